#pragma once

#include <utility>

#include "platoon/ars/ars.hpp"
#include "platoon/env/environment.hpp"

namespace platoon::ars {

// Adapts the platoon environment to the trainer: one seeded episode per call,
// returning the undiscounted episode return. The trainer only ever sees this
// scalar, never per-step rewards.
class PlatoonTask {
 public:
  explicit PlatoonTask(env::EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

  const env::EnvConfig& config() const { return cfg_; }
  std::size_t observation_dim() const { return cfg_.observation_dim(); }
  std::pair<double, double> action_range() const { return {cfg_.world.accel_min, cfg_.world.accel_max}; }

  double run_episode(const PolicyView& view, std::uint64_t seed, RunningStats* visited) const {
    env::PlatoonEnv env(cfg_);
    auto obs = env.reset(seed);
    return play(env, std::move(obs), view, visited);
  }

  // Both members of an antithetic pair start from the same preloaded world.
  PairedReward run_pair(const PolicyView& plus, const PolicyView& minus, std::uint64_t seed, RunningStats* visited_plus,
                        RunningStats* visited_minus) const {
    env::PlatoonEnv start(cfg_);
    const auto obs = start.reset(seed);
    env::PlatoonEnv copy = start;
    const double rp = play(start, obs, plus, visited_plus);
    const double rm = play(copy, obs, minus, visited_minus);
    return {rp, rm};
  }

  static double play(env::PlatoonEnv& env, env::Observation obs, const PolicyView& view, RunningStats* visited) {
    double total = 0.0;
    for (;;) {
      if (visited) visited->push(obs.values);
      auto res = env.step(view.act(obs.values));
      total += res.reward;
      if (res.done) return total;
      obs = std::move(res.observation);
    }
  }

 private:
  env::EnvConfig cfg_;
};

}  // namespace platoon::ars
