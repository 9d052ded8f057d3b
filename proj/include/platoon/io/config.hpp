#pragma once

#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "platoon/ars/ars.hpp"
#include "platoon/common.hpp"
#include "platoon/env/environment.hpp"
#include "platoon/eval/controllers.hpp"
#include "platoon/eval/metrics.hpp"
#include "platoon/io/csv.hpp"

namespace platoon::io {

struct SignalSettings {
  int phase_count = 4;
  double green_s = 30.0;
  double yellow_s = 3.0;
  double offset_s = 0.0;
  int approach_phase = 0;

  traffic::SignalProgram program() const {
    if (phase_count < 1) throw ConfigError("signal.phase_count must be >= 1");
    if (approach_phase < 0 || approach_phase >= phase_count)
      throw ConfigError("signal.approach_phase must be in [0, phase_count)");
    std::vector<traffic::SignalPhase> phases;
    for (int i = 0; i < phase_count; ++i) phases.push_back({green_s, {i}});
    return traffic::SignalProgram(std::move(phases), yellow_s, offset_s, approach_phase);
  }
};

using WeightRatio = std::pair<double, double>;  // (omega1, omega2)

inline std::vector<WeightRatio> default_weight_ratios() {
  return {{1, 6}, {1, 5}, {1, 4}, {1, 3}, {1, 2}, {1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}, {6, 1}};
}

struct EvalSettings {
  int episodes = 25;
  std::uint64_t seed = 1000;  // first evaluation seed; episode i uses seed + i
  eval::GlosaParams glosa;
  eval::StopRule stop_rule;

  std::vector<std::uint64_t> seeds(int count = -1) const {
    if (count < 0) count = episodes;
    std::vector<std::uint64_t> s;
    for (int i = 0; i < count; ++i) s.push_back(seed + static_cast<std::uint64_t>(i));
    return s;
  }
};

struct ExperimentSettings {
  int agents_per_mode = 5;
  int episodes_per_agent = 5;
  std::vector<int> sizes{1, 3, 5, 8};
  int size_episodes = 10;
  std::vector<WeightRatio> weight_ratios = default_weight_ratios();
};

// Everything a run needs, as read from a scenario file.
struct Scenario {
  traffic::WorldConfig world;
  traffic::IdmParams idm;
  SignalSettings signal;
  energy::EvParams ev;
  env::RewardConfig reward;
  env::LeaderDefaults leader;
  double horizon_s = 600.0;
  ars::ArsConfig ars;
  EvalSettings eval;
  ExperimentSettings experiment;

  env::EnvConfig env() const {
    env::EnvConfig c;
    c.world = world;
    c.idm = idm;
    c.signal = signal.program();
    c.ev = ev;
    c.reward = reward;
    c.leader = leader;
    c.horizon_s = horizon_s;
    return c;
  }

  void validate() const {
    env().validate();
    ars.validate();
    if (eval.episodes < 1) throw ConfigError("eval.episodes must be >= 1");
    if (!(eval.glosa.min_speed > 0 && eval.glosa.min_speed <= world.speed_limit))
      throw ConfigError("eval.glosa_min_speed_mps must be in (0, speed_limit]");
    if (!(eval.stop_rule.speed_threshold > 0)) throw ConfigError("eval.stop_speed_mps must be > 0");
    if (eval.stop_rule.min_steps < 1) throw ConfigError("eval.stop_min_steps must be >= 1");
    if (experiment.agents_per_mode < 1) throw ConfigError("experiment.agents_per_mode must be >= 1");
    if (experiment.episodes_per_agent < 1) throw ConfigError("experiment.episodes_per_agent must be >= 1");
    if (experiment.size_episodes < 1) throw ConfigError("experiment.size_episodes must be >= 1");
    if (experiment.sizes.empty()) throw ConfigError("experiment.sizes must not be empty");
    for (int n : experiment.sizes)
      if (n < 1 || n > 8) throw ConfigError("experiment.sizes: every size must be in [1, 8]");
    if (experiment.weight_ratios.empty()) throw ConfigError("experiment.weight_ratios must not be empty");
    for (auto [w1, w2] : experiment.weight_ratios)
      if (!(w1 >= 1 && w1 <= 6 && w2 >= 1 && w2 <= 6))
        throw ConfigError("experiment.weight_ratios: each ratio must lie between 1/6 and 6/1");
  }
};

// Sets one "section.key" value with the same parsing and diagnostics as the file reader.
void apply_override(Scenario& s, const std::string& dotted, const std::string& value);

// Reads an INI-style scenario on top of `base`. Unknown sections or keys are errors.
Scenario parse_scenario(std::istream& in, Scenario base = {});
Scenario load_scenario(const std::string& path, Scenario base = {});

// Canonical text of a fully resolved scenario; parsing it reproduces the scenario.
std::string format_scenario(const Scenario& s);

// section -> key -> value, for JSON sidecars and manifests.
std::map<std::string, std::map<std::string, std::string>> scenario_entries(const Scenario& s);

}  // namespace platoon::io
