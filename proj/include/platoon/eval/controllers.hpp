#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "platoon/ars/linear_policy.hpp"
#include "platoon/ars/parallel.hpp"
#include "platoon/env/environment.hpp"
#include "platoon/eval/metrics.hpp"

namespace platoon::eval {

enum class ControllerKind { ArsPolicy, IdmBaseline, Glosa };

inline std::string to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::ArsPolicy: return "ars";
    case ControllerKind::IdmBaseline: return "idm";
    case ControllerKind::Glosa: return "glosa";
  }
  return "unknown";
}

struct GlosaParams {
  double min_speed = 2.0;  // crawl floor for the advised speed [m/s]
};

struct GlosaInput {
  double distance = 0.0;          // to the stop line [m]
  double speed = 0.0;             // current ego speed [m/s]
  traffic::SignalState signal;    // current interval
  double next_green = 0.0;        // time until the next approach green begins [s]
};

// Target speed for arriving on green, ignoring the vehicles behind.
inline double glosa_advice(const GlosaInput& in, double speed_limit, const GlosaParams& p = {}) {
  if (in.distance <= 0.0) return speed_limit;
  if (in.signal.approach_proceed) {
    const double arrival = in.distance / std::max(in.speed, p.min_speed);
    if (arrival <= in.signal.remaining) return speed_limit;
  }
  if (!(in.next_green > 0.0)) return speed_limit;
  return std::clamp(in.distance / in.next_green, p.min_speed, speed_limit);
}

struct Controller {
  ControllerKind kind = ControllerKind::IdmBaseline;
  ars::LinearPolicy policy;  // ArsPolicy only
  GlosaParams glosa;

  static Controller idm() { return {ControllerKind::IdmBaseline, {}, {}}; }
  static Controller glosa_default(GlosaParams p = {}) { return {ControllerKind::Glosa, {}, p}; }
  static Controller ars(ars::LinearPolicy p) { return {ControllerKind::ArsPolicy, std::move(p), {}}; }
};

// Produces the raw ego action; the environment applies the safety minimum.
class ControllerRunner {
 public:
  ControllerRunner(const Controller& c, const env::EnvConfig& cfg) : ctl_(c), cfg_(cfg) {
    if (c.kind == ControllerKind::ArsPolicy) {
      if (c.policy.dim() != cfg.observation_dim())
        throw DimensionMismatch(cfg.observation_dim(), c.policy.dim(), "policy checkpoint vs scenario");
      view_ = ars::make_view(c.policy, std::nullopt, cfg.world.accel_min, cfg.world.accel_max);
    }
  }

  double act(const env::PlatoonEnv& env, const env::Observation& obs) const {
    switch (ctl_.kind) {
      case ControllerKind::ArsPolicy: return view_->act(obs.values);
      case ControllerKind::IdmBaseline: return env.idm_bound();
      case ControllerKind::Glosa: {
        const auto& world = env.world();
        const auto& ego = world.ego();
        GlosaInput in{cfg_.world.lane_length - ego.position, ego.speed, world.signal_now(),
                      world.signal().next_green_start(world.time())};
        const double target = glosa_advice(in, cfg_.world.speed_limit, ctl_.glosa);
        return world.clamp_accel((target - ego.speed) / cfg_.world.dt);
      }
    }
    return 0.0;
  }

 private:
  const Controller& ctl_;
  const env::EnvConfig& cfg_;
  std::optional<ars::PolicyView> view_;
};

struct EpisodeRun {
  std::uint64_t seed = 0;
  EpisodeOutcome outcome;
  double episode_return = 0.0;
  env::TerminationReason reason = env::TerminationReason::AllCrossed;
  int ego_red_crossings = 0;
  std::vector<traffic::TrajectoryRow> trajectory;  // kept only on request
  std::vector<env::StepLogEntry> steps;
};

struct EvalResult {
  ControllerKind controller = ControllerKind::IdmBaseline;
  std::vector<EpisodeRun> runs;
  Metrics metrics;

  std::vector<EpisodeOutcome> outcomes() const {
    std::vector<EpisodeOutcome> o;
    for (const auto& r : runs) o.push_back(r.outcome);
    return o;
  }
  std::vector<double> total_energies() const {
    std::vector<double> e;
    for (const auto& r : runs) e.push_back(r.outcome.total_energy());
    return e;
  }
  std::vector<double> mean_delays() const {
    std::vector<double> d;
    for (const auto& r : runs) d.push_back(r.outcome.mean_delay());
    return d;
  }
};

inline LaneGeometry geometry_of(const env::EnvConfig& cfg) {
  return {cfg.world.lane_length, cfg.world.speed_limit, cfg.world.dt};
}

inline EpisodeRun run_episode(const env::EnvConfig& cfg, const Controller& controller, std::uint64_t seed,
                              bool keep_trajectory = false, const StopRule& stop_rule = {}) {
  env::PlatoonEnv env(cfg);
  ControllerRunner runner(controller, cfg);
  auto obs = env.reset(seed, true);
  EpisodeRun run;
  run.seed = seed;
  for (;;) {
    auto res = env.step(runner.act(env, obs));
    run.episode_return += res.reward;
    if (res.done) break;
    obs = std::move(res.observation);
  }
  run.reason = *env.record().reason;
  const int ego_id = env.record().vehicle_ids.front();
  for (int id : env.world().red_light_crossers()) run.ego_red_crossings += id == ego_id;
  run.outcome = outcome_from_log(env.world().log(), geometry_of(cfg), stop_rule);
  run.steps = env.record().steps;
  if (keep_trajectory) run.trajectory = env.world().log();
  return run;
}

// Evaluates one controller on a seed list; episodes are independent and run
// in parallel, results kept in seed order.
inline EvalResult run_controller(const env::EnvConfig& cfg, const Controller& controller,
                                 const std::vector<std::uint64_t>& seeds, unsigned jobs = 0,
                                 bool keep_trajectories = false, const StopRule& stop_rule = {}) {
  EvalResult result;
  result.controller = controller.kind;
  result.runs.resize(seeds.size());
  parallel_for(seeds.size(), jobs,
               [&](std::size_t i) { result.runs[i] = run_episode(cfg, controller, seeds[i], keep_trajectories, stop_rule); });
  const auto outcomes = result.outcomes();
  result.metrics = aggregate(outcomes);
  return result;
}

}  // namespace platoon::eval
