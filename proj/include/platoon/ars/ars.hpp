#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "platoon/ars/linear_policy.hpp"
#include "platoon/ars/parallel.hpp"
#include "platoon/ars/running_stats.hpp"
#include "platoon/common.hpp"

namespace platoon::ars {

struct ArsConfig {
  double step_size = 0.015;   // alpha
  int directions = 32;        // K
  double noise_std = 0.2;     // nu
  int top_directions = 16;    // b
  int iterations = 300;
  int eval_interval = 10;     // 0 disables evaluation
  int eval_episodes = 5;
  std::uint64_t seed = 0;
  unsigned jobs = 0;          // 0: hardware concurrency

  void validate() const {
    if (!(step_size > 0)) throw ConfigError("ars.step_size must be > 0");
    if (directions < 1) throw ConfigError("ars.directions must be >= 1");
    if (!(noise_std > 0)) throw ConfigError("ars.noise_std must be > 0");
    if (top_directions < 1 || top_directions > directions)
      throw ConfigError("ars.top_directions must be in [1, directions]");
    if (iterations < 0) throw ConfigError("ars.iterations must be >= 0");
    if (eval_interval < 0) throw ConfigError("ars.eval_interval must be >= 0");
    if (eval_episodes < 0) throw ConfigError("ars.eval_episodes must be >= 0");
  }
};

using Direction = std::vector<double>;
using PairedReward = std::pair<double, double>;  // (r+, r-)

struct IterationReport {
  int iteration = 0;
  std::vector<PairedReward> rewards;
  double mean_reward = 0.0;
  double smoothed_reward = 0.0;
  std::optional<double> eval_reward;
  double update_norm = 0.0;
};

// An episodic task maps a frozen policy and an environment seed to one scalar
// episode return. Visited states are pushed into `visited` when non-null.
template <class T>
concept EpisodicTask = requires(const T& t, const PolicyView& view, std::uint64_t seed, RunningStats* visited) {
  { t.observation_dim() } -> std::convertible_to<std::size_t>;
  { t.run_episode(view, seed, visited) } -> std::convertible_to<double>;
};

// Optional: a task that can run the +/- pair from one shared start state.
template <class T>
concept PairedTask = EpisodicTask<T> && requires(const T& t, const PolicyView& view, std::uint64_t seed,
                                                 RunningStats* visited) {
  { t.run_pair(view, view, seed, visited, visited) } -> std::convertible_to<PairedReward>;
};

template <class T>
std::pair<double, double> task_action_range(const T& task) {
  if constexpr (requires { task.action_range(); }) {
    return task.action_range();
  } else {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
}

inline std::uint64_t direction_seed(std::uint64_t base, int iteration) {
  return derive_seed(base, {0xD1ECu, static_cast<std::uint64_t>(iteration)});
}
// The +/- rollouts of one direction share this environment seed.
inline std::uint64_t rollout_seed(std::uint64_t base, int iteration, int direction) {
  return derive_seed(base, {0x2011u, static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(direction)});
}
inline std::uint64_t eval_seed(std::uint64_t base, int episode) {
  return derive_seed(base, {0xE7A1u, static_cast<std::uint64_t>(episode)});
}

// K directions of dimension p with i.i.d. standard normal entries.
template <class Rng>
std::vector<Direction> sample_directions(int count, std::size_t dim, Rng& rng) {
  if (count < 1) throw std::invalid_argument("sample_directions: need at least one direction");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Direction> dirs(static_cast<std::size_t>(count), Direction(dim));
  for (auto& d : dirs)
    for (auto& e : d) e = normal(rng);
  return dirs;
}

inline double population_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

// Top-b update scaled by the std of the retained 2b rewards.
// Returns the norm of the applied step; 0 when the update is skipped.
inline double update_policy(LinearPolicy& policy, const std::vector<Direction>& directions,
                            const std::vector<PairedReward>& rewards, const ArsConfig& cfg) {
  if (rewards.size() != directions.size())
    throw std::invalid_argument("update_policy: need one reward pair per direction");
  const std::size_t k = directions.size();
  const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(cfg.top_directions), k);

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::max(rewards[a].first, rewards[a].second) > std::max(rewards[b].first, rewards[b].second);
  });
  order.resize(top);

  std::vector<double> kept;
  kept.reserve(2 * top);
  for (auto i : order) {
    kept.push_back(rewards[i].first);
    kept.push_back(rewards[i].second);
  }
  const double eps = population_stddev(kept);
  if (!(eps > 0.0)) return 0.0;

  std::vector<double> step(policy.dim(), 0.0);
  for (auto i : order) {
    if (directions[i].size() != policy.dim()) throw DimensionMismatch(policy.dim(), directions[i].size(), "direction");
    const double diff = rewards[i].first - rewards[i].second;
    for (std::size_t d = 0; d < policy.dim(); ++d) step[d] += diff * directions[i][d];
  }
  const double scale = cfg.step_size / (static_cast<double>(top) * eps);
  double norm2 = 0.0;
  for (std::size_t d = 0; d < policy.dim(); ++d) {
    const double delta = scale * step[d];
    policy.theta[d] += delta;
    norm2 += delta * delta;
  }
  return std::sqrt(norm2);
}

inline void update_normalizer(LinearPolicy& policy, const RunningStats& batch) { policy.normalizer.merge(batch); }

inline void update_normalizer(LinearPolicy& policy, const std::vector<std::vector<double>>& states) {
  RunningStats batch(policy.dim());
  for (const auto& s : states) batch.push(s);
  update_normalizer(policy, batch);
}

struct RolloutBatch {
  std::vector<PairedReward> rewards;
  RunningStats visited;
};

// Runs the 2K perturbed episodes of one iteration. Visited-state statistics
// are merged in direction order, so the result is independent of `jobs`.
template <EpisodicTask Task>
RolloutBatch collect_rollouts(const LinearPolicy& policy, const std::vector<Direction>& directions, const Task& task,
                              const ArsConfig& cfg, int iteration) {
  const auto [amin, amax] = task_action_range(task);
  const std::size_t k = directions.size();
  std::vector<PairedReward> rewards(k);
  std::vector<RunningStats> stats(2 * k, RunningStats(policy.dim()));

  parallel_for(k, cfg.jobs, [&](std::size_t i) {
    const PolicyView plus = make_view(policy, Perturbation{+1, cfg.noise_std, directions[i]}, amin, amax);
    const PolicyView minus = make_view(policy, Perturbation{-1, cfg.noise_std, directions[i]}, amin, amax);
    const std::uint64_t seed = rollout_seed(cfg.seed, iteration, static_cast<int>(i));
    if constexpr (PairedTask<Task>) {
      rewards[i] = task.run_pair(plus, minus, seed, &stats[2 * i], &stats[2 * i + 1]);
    } else {
      rewards[i].first = task.run_episode(plus, seed, &stats[2 * i]);
      rewards[i].second = task.run_episode(minus, seed, &stats[2 * i + 1]);
    }
  });

  RolloutBatch batch{std::move(rewards), RunningStats(policy.dim())};
  for (const auto& s : stats) batch.visited.merge(s);
  return batch;
}

// Mean return of the unperturbed policy on fixed evaluation seeds. Does not
// touch the normalizer.
template <EpisodicTask Task>
double evaluate_policy(const LinearPolicy& policy, const Task& task, const ArsConfig& cfg) {
  if (cfg.eval_episodes <= 0) return std::numeric_limits<double>::quiet_NaN();
  const auto [amin, amax] = task_action_range(task);
  const PolicyView view = make_view(policy, std::nullopt, amin, amax);
  std::vector<double> returns(static_cast<std::size_t>(cfg.eval_episodes));
  parallel_for(returns.size(), cfg.jobs, [&](std::size_t e) {
    returns[e] = task.run_episode(view, eval_seed(cfg.seed, static_cast<int>(e)), nullptr);
  });
  return std::accumulate(returns.begin(), returns.end(), 0.0) / static_cast<double>(returns.size());
}

struct TrainResult {
  LinearPolicy policy;
  std::vector<IterationReport> reports;
};

using IterationCallback = std::function<void(const IterationReport&, const LinearPolicy&)>;

// sample -> rollout -> sort -> update -> normalize, for a fixed iteration budget.
template <EpisodicTask Task>
TrainResult train(const ArsConfig& cfg, const Task& task, const IterationCallback& on_iteration = {}) {
  cfg.validate();
  TrainResult result{LinearPolicy(task.observation_dim()), {}};
  LinearPolicy& policy = result.policy;
  double smoothed = 0.0;

  for (int j = 0; j < cfg.iterations; ++j) {
    std::mt19937_64 rng(direction_seed(cfg.seed, j));
    const auto directions = sample_directions(cfg.directions, policy.dim(), rng);
    RolloutBatch batch = collect_rollouts(policy, directions, task, cfg, j);

    IterationReport report;
    report.iteration = j;
    double sum = 0.0;
    for (const auto& [rp, rm] : batch.rewards) sum += rp + rm;
    report.mean_reward = sum / (2.0 * static_cast<double>(batch.rewards.size()));
    smoothed = j == 0 ? report.mean_reward : 0.8 * smoothed + 0.2 * report.mean_reward;
    report.smoothed_reward = smoothed;

    report.update_norm = update_policy(policy, directions, batch.rewards, cfg);
    update_normalizer(policy, batch.visited);

    const bool last = j + 1 == cfg.iterations;
    if (cfg.eval_interval > 0 && ((j + 1) % cfg.eval_interval == 0 || last))
      report.eval_reward = evaluate_policy(policy, task, cfg);
    report.rewards = std::move(batch.rewards);
    if (on_iteration) on_iteration(report, policy);
    result.reports.push_back(std::move(report));
  }
  return result;
}

}  // namespace platoon::ars
