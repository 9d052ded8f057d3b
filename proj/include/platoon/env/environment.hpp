#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "platoon/common.hpp"
#include "platoon/energy/ev_energy.hpp"
#include "platoon/env/observation.hpp"
#include "platoon/traffic/world.hpp"

namespace platoon::env {

enum class RewardMode { EpisodicDelayed, Distributed };

inline std::string to_string(RewardMode m) { return m == RewardMode::EpisodicDelayed ? "episodic" : "distributed"; }

struct RewardConfig {
  double omega1 = 6.0;  // weight on energy [1/Wh]
  double omega2 = 1.0;  // weight on delay [1/s]
  RewardMode mode = RewardMode::EpisodicDelayed;

  void validate() const {
    if (!(omega1 >= 0)) throw ConfigError("reward.omega1 must be >= 0");
    if (!(omega2 >= 0)) throw ConfigError("reward.omega2 must be >= 0");
  }
};

enum class TerminationReason { AllCrossed, Truncated };

struct EnvConfig {
  traffic::WorldConfig world;
  traffic::IdmParams idm;
  traffic::SignalProgram signal = traffic::SignalProgram::standard_four_phase();
  energy::EvParams ev;
  RewardConfig reward;
  LeaderDefaults leader;
  double horizon_s = 600.0;  // after platoon injection

  void validate() const {
    world.validate();
    idm.validate();
    signal.validate();
    ev.validate();
    reward.validate();
    if (!(horizon_s > 0)) throw ConfigError("world.horizon_s must be > 0");
    if (!(leader.range > 0)) throw ConfigError("observation.chi_x_m must be > 0");
  }

  std::size_t observation_dim() const {
    return env::observation_dim(static_cast<std::size_t>(world.platoon_size),
                                static_cast<std::size_t>(signal.encoding_dim()));
  }
};

struct StepLogEntry {
  double time = 0.0;        // simulation time at the end of the step
  double raw_action = 0.0;  // policy output after the accel-box clip
  double idm_bound = 0.0;   // clamped IDM recommendation for the ego
  double applied = 0.0;
  double reward = 0.0;
};

// Per-episode bookkeeping for the platoon: crossing times, energies frozen at
// crossing, and the step log.
struct EpisodeRecord {
  double t0 = 0.0;
  double end_time = 0.0;
  std::vector<int> vehicle_ids;  // ego first
  std::vector<std::optional<double>> crossing_time;
  std::vector<double> energy_wh;
  std::vector<StepLogEntry> steps;
  std::optional<TerminationReason> reason;
  int rewards_emitted = 0;

  std::size_t slot(int vehicle_id) const {
    for (std::size_t i = 0; i < vehicle_ids.size(); ++i)
      if (vehicle_ids[i] == vehicle_id) return i;
    throw std::out_of_range("vehicle " + std::to_string(vehicle_id) + " is not in the ego platoon");
  }

  // Crossing time, or the end of the episode for vehicles that never crossed.
  double finish_time(std::size_t i) const { return crossing_time[i].value_or(end_time); }

  double delay(std::size_t i, double lane_length, double speed_limit) const {
    return finish_time(i) - t0 - lane_length / speed_limit;
  }
};

// Eq. 14 style platoon reward: sum of -omega1 * e_i - omega2 * d_i.
inline double platoon_reward(const EpisodeRecord& record, const RewardConfig& rc, double lane_length,
                             double speed_limit) {
  double r = 0.0;
  for (std::size_t i = 0; i < record.vehicle_ids.size(); ++i)
    r += -rc.omega1 * record.energy_wh[i] - rc.omega2 * record.delay(i, lane_length, speed_limit);
  return r;
}

// Energy of one platoon vehicle from episode start to its crossing (or truncation).
inline double episode_energy(const EpisodeRecord& record, int vehicle_id) {
  return record.energy_wh[record.slot(vehicle_id)];
}

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

// Episodic decision process around one World: observation, safety-clamped
// ego action, delayed terminal reward (or per-step proxy in Distributed mode).
class PlatoonEnv {
 public:
  explicit PlatoonEnv(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

  const EnvConfig& config() const { return cfg_; }
  std::size_t observation_dim() const { return cfg_.observation_dim(); }

  Observation reset(std::uint64_t seed, bool log_trajectory = false) {
    auto wc = cfg_.world;
    wc.rng_seed = seed;
    world_.emplace(wc, cfg_.idm, cfg_.signal, cfg_.ev);
    world_->set_logging(false);
    world_->preload();
    if (log_trajectory) {
      world_->set_logging(true);
      world_->log_snapshot();
    }
    record_ = EpisodeRecord{};
    record_.t0 = world_->platoon_injected_at();
    record_.end_time = record_.t0;
    record_.vehicle_ids = world_->platoon_ids();
    record_.crossing_time.assign(record_.vehicle_ids.size(), std::nullopt);
    record_.energy_wh.assign(record_.vehicle_ids.size(), 0.0);
    return observe();
  }

  bool active() const { return world_.has_value() && !record_.reason; }
  bool done() const { return record_.reason.has_value(); }

  // Eq. 12 style safety filter: never exceed the IDM recommendation.
  double idm_bound() const {
    require_world();
    return world_->idm_accel(world_->ego_index());
  }
  double apply_action(double raw) const {
    const double clipped = world_->clamp_accel(raw);
    return std::min(clipped, idm_bound());
  }

  StepResult step(double raw) {
    if (!world_) throw LifecycleError("step() before reset()");
    if (record_.reason) throw LifecycleError("step() after episode termination");

    StepLogEntry entry;
    entry.raw_action = world_->clamp_accel(raw);
    entry.idm_bound = idm_bound();
    entry.applied = std::min(entry.raw_action, entry.idm_bound);

    const double ego_x_before = world_->ego().position;
    world_->step(entry.applied);
    entry.time = world_->time();
    const double ego_dx = world_->ego().position - ego_x_before;

    double step_platoon_energy = 0.0;
    const auto& vehicles = world_->vehicles();
    for (std::size_t i = 0; i < record_.vehicle_ids.size(); ++i) {
      if (record_.crossing_time[i]) continue;
      const auto& v = vehicles[*world_->index_of(record_.vehicle_ids[i])];
      step_platoon_energy += v.energy_wh - record_.energy_wh[i];
      record_.energy_wh[i] = v.energy_wh;
      if (v.crossed_at) record_.crossing_time[i] = v.crossed_at;
    }
    record_.end_time = world_->time();

    const bool all_crossed = std::all_of(record_.crossing_time.begin(), record_.crossing_time.end(),
                                         [](const auto& t) { return t.has_value(); });
    if (all_crossed) record_.reason = TerminationReason::AllCrossed;
    else if (world_->time() - record_.t0 >= cfg_.horizon_s - 1e-9) record_.reason = TerminationReason::Truncated;

    double reward = 0.0;
    const auto& rc = cfg_.reward;
    if (rc.mode == RewardMode::EpisodicDelayed) {
      if (record_.reason) reward = terminal_reward();
    } else {
      reward = -rc.omega1 * step_platoon_energy + rc.omega2 * ego_dx / cfg_.world.speed_limit;
    }
    if (reward != 0.0) ++record_.rewards_emitted;
    entry.reward = reward;
    record_.steps.push_back(entry);
    return {observe(), reward, record_.reason.has_value()};
  }

  double terminal_reward() const {
    return platoon_reward(record_, cfg_.reward, cfg_.world.lane_length, cfg_.world.speed_limit);
  }

  Observation observe() const {
    require_world();
    return build_observation(*world_, cfg_.leader);
  }

  const traffic::World& world() const {
    require_world();
    return *world_;
  }
  const EpisodeRecord& record() const { return record_; }

 private:
  void require_world() const {
    if (!world_) throw LifecycleError("environment used before reset()");
  }

  EnvConfig cfg_;
  std::optional<traffic::World> world_;
  EpisodeRecord record_;
};

}  // namespace platoon::env
