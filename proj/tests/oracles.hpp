#pragma once

// Independent reference implementations used to check the library.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "platoon/ars/linear_policy.hpp"
#include "platoon/ars/running_stats.hpp"

namespace oracle {

// Top-b selection by repeated linear scans (earliest index wins ties), two-pass
// standard deviation, explicit accumulation.
inline std::vector<double> ars_update(std::vector<double> theta, const std::vector<std::vector<double>>& dirs,
                                      const std::vector<std::pair<double, double>>& rewards, double alpha, int b) {
  const std::size_t k = dirs.size();
  std::vector<bool> used(k, false);
  std::vector<std::size_t> chosen;
  for (int c = 0; c < b; ++c) {
    long best = -1;
    for (std::size_t i = 0; i < k; ++i) {
      if (used[i]) continue;
      const double m = rewards[i].first > rewards[i].second ? rewards[i].first : rewards[i].second;
      const double mb = best < 0 ? 0.0
                                 : (rewards[best].first > rewards[best].second ? rewards[best].first
                                                                               : rewards[best].second);
      if (best < 0 || m > mb) best = static_cast<long>(i);
    }
    used[best] = true;
    chosen.push_back(static_cast<std::size_t>(best));
  }
  double sum = 0.0;
  for (auto i : chosen) sum += rewards[i].first + rewards[i].second;
  const double mean = sum / (2.0 * b);
  double ss = 0.0;
  for (auto i : chosen) {
    ss += (rewards[i].first - mean) * (rewards[i].first - mean);
    ss += (rewards[i].second - mean) * (rewards[i].second - mean);
  }
  const double eps = std::sqrt(ss / (2.0 * b));
  if (eps == 0.0) return theta;
  for (std::size_t d = 0; d < theta.size(); ++d) {
    double acc = 0.0;
    for (auto i : chosen) acc += (rewards[i].first - rewards[i].second) * dirs[i][d];
    theta[d] += alpha / (b * eps) * acc;
  }
  return theta;
}

struct Moments {
  std::vector<double> mean;
  std::vector<double> variance;  // population
};

inline Moments two_pass(const std::vector<std::vector<double>>& xs) {
  const std::size_t p = xs.front().size();
  Moments m{std::vector<double>(p, 0.0), std::vector<double>(p, 0.0)};
  for (const auto& x : xs)
    for (std::size_t i = 0; i < p; ++i) m.mean[i] += x[i];
  for (auto& v : m.mean) v /= static_cast<double>(xs.size());
  for (const auto& x : xs)
    for (std::size_t i = 0; i < p; ++i) m.variance[i] += (x[i] - m.mean[i]) * (x[i] - m.mean[i]);
  for (auto& v : m.variance) v /= static_cast<double>(xs.size());
  return m;
}

// One-step task with reward -||theta - target||^2; the trainer only sees the
// perturbed weights through the policy view.
struct QuadraticTask {
  std::vector<double> target;
  std::size_t observation_dim() const { return target.size(); }
  double run_episode(const platoon::ars::PolicyView& view, std::uint64_t, platoon::ars::RunningStats*) const {
    double r = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) r -= (view.weights[i] - target[i]) * (view.weights[i] - target[i]);
    return r;
  }
};

inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace oracle
