#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "platoon/ars/ars.hpp"
#include "platoon/ars/platoon_task.hpp"
#include "platoon/eval/controllers.hpp"
#include "platoon/eval/metrics.hpp"

namespace platoon::eval {

using ProgressFn = std::function<void(const std::string&)>;

inline ars::TrainResult train_agent(const env::EnvConfig& cfg, const ars::ArsConfig& ac,
                                    const ars::IterationCallback& cb = {}) {
  return ars::train(ac, ars::PlatoonTask(cfg), cb);
}

struct ControllerSummary {
  std::string label;
  Metrics metrics;
  double energy_variance = 0.0;  // unbiased, over per-episode platoon totals
  std::vector<EpisodeOutcome> outcomes;
};

inline ControllerSummary summarize(std::string label, std::vector<EpisodeOutcome> outcomes) {
  ControllerSummary s;
  s.label = std::move(label);
  s.metrics = aggregate(outcomes);
  std::vector<double> e;
  for (const auto& o : outcomes) e.push_back(o.total_energy());
  s.energy_variance = variance_of(e);
  s.outcomes = std::move(outcomes);
  return s;
}

// Percentage improvement of `value` over `baseline` (positive = lower than baseline).
inline double improvement_pct(double baseline, double value) {
  return baseline == 0.0 ? 0.0 : 100.0 * (baseline - value) / baseline;
}

// ---- ER vs DR ----------------------------------------------------------

struct AblationConfig {
  int agents_per_mode = 5;
  int episodes_per_agent = 5;
  std::uint64_t eval_seed = 1000;  // agent a, episode e -> eval_seed + a * episodes_per_agent + e
};

struct AblationResult {
  ControllerSummary er;
  ControllerSummary dr;
  ControllerSummary idm;
};

// Agent a of either mode uses training seed ars.seed + a and is evaluated on
// its own block of episode seeds, so ER, DR and IDM see the same 25 worlds.
inline AblationResult ablation_er_vs_dr(const env::EnvConfig& base, const ars::ArsConfig& ac, const AblationConfig& ab,
                                        const ProgressFn& progress = {}) {
  std::vector<std::uint64_t> all_seeds;
  auto block = [&](int a) {
    std::vector<std::uint64_t> s;
    for (int e = 0; e < ab.episodes_per_agent; ++e)
      s.push_back(ab.eval_seed + static_cast<std::uint64_t>(a * ab.episodes_per_agent + e));
    return s;
  };
  for (int a = 0; a < ab.agents_per_mode; ++a)
    for (auto s : block(a)) all_seeds.push_back(s);

  auto run_mode = [&](env::RewardMode mode) {
    env::EnvConfig cfg = base;
    cfg.reward.mode = mode;
    std::vector<EpisodeOutcome> outcomes;
    for (int a = 0; a < ab.agents_per_mode; ++a) {
      ars::ArsConfig c = ac;
      c.seed = ac.seed + static_cast<std::uint64_t>(a);
      if (progress) progress("er-vs-dr: training " + env::to_string(mode) + " agent " + std::to_string(a + 1) + "/" +
                             std::to_string(ab.agents_per_mode));
      const auto trained = train_agent(cfg, c);
      const auto res = run_controller(base, Controller::ars(trained.policy), block(a), ac.jobs);
      for (const auto& o : res.outcomes()) outcomes.push_back(o);
    }
    return outcomes;
  };

  AblationResult r;
  r.er = summarize("ars_er", run_mode(env::RewardMode::EpisodicDelayed));
  r.dr = summarize("ars_dr", run_mode(env::RewardMode::Distributed));
  r.idm = summarize("idm", run_controller(base, Controller::idm(), all_seeds, ac.jobs).outcomes());
  return r;
}

// ---- weighting sweep -----------------------------------------------------

struct WeightSweepRow {
  double omega1 = 0.0;
  double omega2 = 0.0;
  Metrics metrics;
  double delay_improvement_pct = 0.0;
  double energy_improvement_pct = 0.0;
};

struct WeightSweepResult {
  Metrics idm;
  std::vector<WeightSweepRow> rows;
};

inline WeightSweepResult sweep_weights(const env::EnvConfig& base, const ars::ArsConfig& ac,
                                       const std::vector<std::pair<double, double>>& ratios,
                                       const std::vector<std::uint64_t>& seeds, const ProgressFn& progress = {}) {
  WeightSweepResult out;
  out.idm = run_controller(base, Controller::idm(), seeds, ac.jobs).metrics;
  for (const auto& [w1, w2] : ratios) {
    env::EnvConfig cfg = base;
    cfg.reward.omega1 = w1;
    cfg.reward.omega2 = w2;
    if (progress) progress("weight-sweep: training omega1/omega2 = " + std::to_string(w1) + "/" + std::to_string(w2));
    const auto trained = train_agent(cfg, ac);
    WeightSweepRow row;
    row.omega1 = w1;
    row.omega2 = w2;
    row.metrics = run_controller(base, Controller::ars(trained.policy), seeds, ac.jobs).metrics;
    row.delay_improvement_pct = improvement_pct(out.idm.delay_per_vehicle, row.metrics.delay_per_vehicle);
    row.energy_improvement_pct = improvement_pct(out.idm.energy_per_vehicle, row.metrics.energy_per_vehicle);
    out.rows.push_back(row);
  }
  return out;
}

// ---- platoon size sweep --------------------------------------------------

struct SizeSweepRow {
  int platoon_size = 0;
  ControllerKind controller = ControllerKind::IdmBaseline;
  Metrics metrics;
};

struct SizeTrajectory {
  int platoon_size = 0;
  ControllerKind controller = ControllerKind::IdmBaseline;
  std::uint64_t seed = 0;
  std::vector<traffic::TrajectoryRow> rows;
};

struct SizeSweepResult {
  std::vector<SizeSweepRow> rows;
  std::vector<SizeTrajectory> trajectories;  // first seed of each (size, controller)
  std::vector<ars::LinearPolicy> policies;   // one per size, same order as the sizes

  const Metrics& find(int size, ControllerKind k) const {
    for (const auto& r : rows)
      if (r.platoon_size == size && r.controller == k) return r.metrics;
    throw std::out_of_range("size sweep: no row for that size/controller");
  }
};

inline SizeSweepResult sweep_platoon_size(const env::EnvConfig& base, const ars::ArsConfig& ac,
                                          const std::vector<int>& sizes, const std::vector<std::uint64_t>& seeds,
                                          const GlosaParams& glosa = {}, const ProgressFn& progress = {}) {
  SizeSweepResult out;
  for (int n : sizes) {
    env::EnvConfig cfg = base;
    cfg.world.platoon_size = n;
    if (progress) progress("size-sweep: training platoon size " + std::to_string(n));
    auto trained = train_agent(cfg, ac);
    const Controller controllers[] = {Controller::ars(trained.policy), Controller::idm(),
                                      Controller::glosa_default(glosa)};
    for (const auto& c : controllers) {
      auto res = run_controller(cfg, c, seeds, ac.jobs, true);
      out.rows.push_back({n, c.kind, res.metrics});
      if (!res.runs.empty())
        out.trajectories.push_back({n, c.kind, res.runs.front().seed, std::move(res.runs.front().trajectory)});
    }
    out.policies.push_back(std::move(trained.policy));
  }
  return out;
}

}  // namespace platoon::eval
