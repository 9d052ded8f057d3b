#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "platoon/ars/ars.hpp"
#include "platoon/ars/platoon_task.hpp"

using namespace platoon;
using namespace platoon::ars;

namespace {

std::vector<std::vector<double>> random_states(std::mt19937_64& rng, std::size_t n, std::size_t p) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> xs(n, std::vector<double>(p));
  for (auto& x : xs)
    for (std::size_t i = 0; i < p; ++i) x[i] = 10.0 * i + (i + 1) * normal(rng);
  return xs;
}

// Counts episodes to check the 2K rollout budget.
struct CountingTask {
  std::atomic<int>* calls;
  std::size_t observation_dim() const { return 3; }
  double run_episode(const PolicyView& v, std::uint64_t, RunningStats* visited) const {
    ++*calls;
    if (visited) visited->push(std::vector<double>{1, 2, 3});
    return v.weights[0];
  }
};

}  // namespace

TEST(Policy, ZeroPolicyActsZero) {
  LinearPolicy p(4);
  EXPECT_DOUBLE_EQ(policy_act(p, std::vector<double>{1, 2, 3, 4}), 0.0);
  EXPECT_EQ(p.norm_mean(), std::vector<double>(4, 0.0));
  EXPECT_EQ(p.norm_var(), std::vector<double>(4, 1.0));
}

TEST(Policy, LinearOutputWithIdentityNormalizer) {
  LinearPolicy p(2);
  p.theta = {0.2, 0.0};
  EXPECT_DOUBLE_EQ(policy_act(p, std::vector<double>{5, 100}), 1.0);
  p.theta = {1.0, 0.0};
  EXPECT_DOUBLE_EQ(policy_output(p, std::vector<double>{5, 0}), 5.0);
  EXPECT_DOUBLE_EQ(policy_act(p, std::vector<double>{5, 0}), 3.0);
  EXPECT_DOUBLE_EQ(policy_act(p, std::vector<double>{-50, 0}), -4.5);
}

TEST(Policy, NormalizedOutput) {
  LinearPolicy p(1);
  p.theta = {1.0};
  p.normalizer = RunningStats::from_moments({10.0}, {4.0}, 5);
  EXPECT_DOUBLE_EQ(policy_output(p, std::vector<double>{14.0}), 2.0);
}

TEST(Policy, VarianceFloor) {
  LinearPolicy p(1);
  p.theta = {1.0};
  p.normalizer = RunningStats::from_moments({0.0}, {0.0}, 5);
  EXPECT_NEAR(policy_output(p, std::vector<double>{1e-4}), 1e-4 / std::sqrt(kVarianceFloor), 1e-9);
}

TEST(Policy, Perturbation) {
  LinearPolicy p(2);
  const std::vector<double> dir{1.0, -1.0};
  const std::vector<double> x{1.0, 2.0};
  EXPECT_DOUBLE_EQ(policy_output(p, x, Perturbation{+1, 0.5, dir}), 0.5 - 1.0);
  EXPECT_DOUBLE_EQ(policy_output(p, x, Perturbation{-1, 0.5, dir}), -0.5 + 1.0);
}

TEST(Policy, DimensionMismatch) {
  LinearPolicy p(3);
  EXPECT_THROW(policy_act(p, std::vector<double>{1, 2}), DimensionMismatch);
}

TEST(Directions, DeterministicForSeed) {
  std::mt19937_64 a(5), b(5), c(6);
  EXPECT_EQ(sample_directions(4, 3, a), sample_directions(4, 3, b));
  std::mt19937_64 d(5);
  EXPECT_NE(sample_directions(4, 3, d), sample_directions(4, 3, c));
}

TEST(Directions, StandardNormalMoments) {
  std::mt19937_64 rng(1);
  const auto dirs = sample_directions(2000, 10, rng);
  double sum = 0, sq = 0;
  for (const auto& d : dirs)
    for (double x : d) sum += x, sq += x * x;
  const double n = 20000;
  EXPECT_NEAR(sum / n, 0.0, 0.03);
  EXPECT_NEAR(sq / n, 1.0, 0.03);
}

TEST(Directions, RejectsZero) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(sample_directions(0, 3, rng), std::invalid_argument);
}

TEST(Update, MatchesOracle) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + trial % 8, b = 1 + trial % k;
    LinearPolicy pol(5);
    for (auto& t : pol.theta) t = normal(rng);
    auto dirs = sample_directions(k, 5, rng);
    std::vector<PairedReward> rewards(k);
    for (auto& [a, c] : rewards) a = 10 * normal(rng), c = 10 * normal(rng);
    ArsConfig cfg;
    cfg.directions = k;
    cfg.top_directions = b;
    const auto want = oracle::ars_update(pol.theta, dirs, rewards, cfg.step_size, b);
    const auto before = pol.theta;
    update_policy(pol, dirs, rewards, cfg);
    for (std::size_t i = 0; i < 5; ++i)
      ASSERT_NEAR(pol.theta[i] - before[i], want[i] - before[i], 1e-12 * std::abs(want[i] - before[i]) + 1e-300);
  }
}

TEST(Update, HandExampleOnlyTopDirection) {
  LinearPolicy pol(2);
  const std::vector<Direction> dirs{{1, 0}, {0, 1}};
  const std::vector<PairedReward> rewards{{10, -10}, {1, -1}};
  ArsConfig cfg;
  cfg.directions = 2;
  cfg.top_directions = 1;
  const double norm = update_policy(pol, dirs, rewards, cfg);
  // eps = std{10, -10} = 10
  EXPECT_DOUBLE_EQ(pol.theta[0], cfg.step_size * 20.0 / 10.0);
  EXPECT_DOUBLE_EQ(pol.theta[1], 0.0);
  EXPECT_DOUBLE_EQ(norm, pol.theta[0]);
}

TEST(Update, ShiftInvariant) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto dirs = sample_directions(6, 4, rng);
  std::vector<PairedReward> rewards(6);
  for (auto& [a, c] : rewards) a = normal(rng), c = normal(rng);
  auto shifted = rewards;
  for (auto& [a, c] : shifted) a += 1000.0, c += 1000.0;
  ArsConfig cfg;
  cfg.directions = 6;
  cfg.top_directions = 3;
  LinearPolicy p1(4), p2(4);
  update_policy(p1, dirs, rewards, cfg);
  update_policy(p2, dirs, shifted, cfg);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(p1.theta[i], p2.theta[i], 1e-9);
}

TEST(Update, SkippedWhenRewardsEqual) {
  LinearPolicy pol(3);
  pol.theta = {1, 2, 3};
  std::mt19937_64 rng(1);
  const auto dirs = sample_directions(4, 3, rng);
  ArsConfig cfg;
  cfg.directions = 4;
  cfg.top_directions = 2;
  EXPECT_EQ(update_policy(pol, dirs, std::vector<PairedReward>(4, {7.0, 7.0}), cfg), 0.0);
  EXPECT_EQ(pol.theta, (std::vector<double>{1, 2, 3}));
}

TEST(Update, AllDirectionsWhenBEqualsK) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto dirs = sample_directions(5, 3, rng);
  std::vector<PairedReward> rewards(5);
  for (auto& [a, c] : rewards) a = normal(rng), c = normal(rng);
  ArsConfig cfg;
  cfg.directions = 5;
  cfg.top_directions = 5;
  LinearPolicy pol(3);
  update_policy(pol, dirs, rewards, cfg);
  const auto want = oracle::ars_update(std::vector<double>(3, 0.0), dirs, rewards, cfg.step_size, 5);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(pol.theta[i], want[i], 1e-12);
}

TEST(Normalizer, StreamingMatchesTwoPass) {
  std::mt19937_64 rng(4);
  const auto xs = random_states(rng, 500, 6);
  RunningStats s(6);
  for (const auto& x : xs) s.push(x);
  const auto ref = oracle::two_pass(xs);
  const auto var = s.variance();
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(s.mean()[i], ref.mean[i], 1e-9);
    EXPECT_NEAR(var[i], ref.variance[i], 1e-9 * std::max(1.0, ref.variance[i]));
  }
}

TEST(Normalizer, MergeIndependentOfPartition) {
  std::mt19937_64 rng(5);
  const auto xs = random_states(rng, 300, 3);
  RunningStats whole(3), left(3), right(3);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    whole.push(xs[i]);
    (i < 117 ? left : right).push(xs[i]);
  }
  left.merge(right);
  EXPECT_EQ(left.count(), whole.count());
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(left.mean()[i], whole.mean()[i], 1e-10);
    EXPECT_NEAR(left.variance()[i], whole.variance()[i], 1e-9);
  }
}

TEST(Normalizer, MergeIntoEmptyAndWithEmpty) {
  RunningStats a(2), b(2);
  b.push(std::vector<double>{1, 2});
  a.merge(RunningStats(2));
  EXPECT_EQ(a.count(), 0u);
  a.merge(b);
  EXPECT_EQ(a.mean(), b.mean());
  EXPECT_THROW(a.merge([] {
    RunningStats c(3);
    c.push(std::vector<double>{1, 2, 3});
    return c;
  }()),
               DimensionMismatch);
}

TEST(Train, ZeroIterationsGivesZeroPolicy) {
  ArsConfig cfg;
  cfg.iterations = 0;
  const auto res = train(cfg, PlatoonTask(env::EnvConfig{}));
  EXPECT_EQ(res.policy.theta, std::vector<double>(20, 0.0));
  EXPECT_EQ(res.policy.obs_count(), 0u);
  EXPECT_TRUE(res.reports.empty());
}

TEST(Train, QuadraticOptimum) {
  oracle::QuadraticTask task{{0.5, -1.0, 2.0, 0.0}};
  ArsConfig cfg;
  cfg.step_size = 0.02;
  cfg.noise_std = 0.1;
  cfg.directions = 8;
  cfg.top_directions = 4;
  cfg.iterations = 500;
  cfg.eval_interval = 0;
  cfg.seed = 3;
  const auto res = train(cfg, task);
  EXPECT_LT(oracle::distance(res.policy.theta, task.target), 1e-2);
}

TEST(Train, RolloutBudgetIsTwoK) {
  std::atomic<int> calls{0};
  ArsConfig cfg;
  cfg.directions = 7;
  cfg.top_directions = 3;
  cfg.iterations = 4;
  cfg.eval_interval = 2;
  cfg.eval_episodes = 3;
  const auto res = train(cfg, CountingTask{&calls});
  EXPECT_EQ(calls.load(), 4 * 2 * 7 + 2 * 3);
  EXPECT_EQ(res.policy.obs_count(), static_cast<std::uint64_t>(4 * 2 * 7));
  ASSERT_EQ(res.reports.size(), 4u);
  EXPECT_FALSE(res.reports[0].eval_reward.has_value());
  EXPECT_TRUE(res.reports[1].eval_reward.has_value());
  for (const auto& r : res.reports) EXPECT_EQ(r.rewards.size(), 7u);
}

TEST(Train, SmoothedRewardRecursion) {
  oracle::QuadraticTask task{{1.0, 1.0}};
  ArsConfig cfg;
  cfg.directions = 4;
  cfg.top_directions = 2;
  cfg.iterations = 20;
  cfg.eval_interval = 0;
  const auto res = train(cfg, task);
  double s = res.reports[0].mean_reward;
  EXPECT_DOUBLE_EQ(res.reports[0].smoothed_reward, s);
  for (std::size_t j = 1; j < res.reports.size(); ++j) {
    s = 0.8 * s + 0.2 * res.reports[j].mean_reward;
    EXPECT_DOUBLE_EQ(res.reports[j].smoothed_reward, s);
  }
}

TEST(Train, IndependentOfWorkerCount) {
  env::EnvConfig ec;
  ArsConfig cfg;
  cfg.iterations = 5;
  cfg.eval_interval = 5;
  cfg.eval_episodes = 2;
  cfg.seed = 17;
  cfg.jobs = 1;
  const auto a = train(cfg, PlatoonTask(ec));
  cfg.jobs = 3;
  const auto b = train(cfg, PlatoonTask(ec));
  EXPECT_EQ(a.policy.theta, b.policy.theta);
  EXPECT_EQ(a.policy.norm_mean(), b.policy.norm_mean());
  EXPECT_EQ(a.policy.norm_var(), b.policy.norm_var());
  for (std::size_t j = 0; j < a.reports.size(); ++j) EXPECT_EQ(a.reports[j].rewards, b.reports[j].rewards);
}

TEST(Train, PairedRolloutsShareStart) {
  // With nu tiny the +/- episodes from the same seed give nearly equal rewards.
  PlatoonTask task(env::EnvConfig{});
  LinearPolicy pol(task.observation_dim());
  std::vector<double> dir(task.observation_dim(), 0.0);
  const auto plus = make_view(pol, Perturbation{+1, 1e-12, dir}, -4.5, 3.0);
  const auto minus = make_view(pol, Perturbation{-1, 1e-12, dir}, -4.5, 3.0);
  const auto [rp, rm] = task.run_pair(plus, minus, 42, nullptr, nullptr);
  EXPECT_EQ(rp, rm);
  EXPECT_EQ(rp, task.run_episode(plus, 42, nullptr));
}

TEST(ArsConfig, Validation) {
  ArsConfig c;
  EXPECT_NO_THROW(c.validate());
  c.top_directions = 40;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.noise_std = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.iterations = -1;
  EXPECT_THROW(c.validate(), ConfigError);
}
