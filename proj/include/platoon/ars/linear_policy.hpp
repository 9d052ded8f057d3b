#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "platoon/ars/running_stats.hpp"
#include "platoon/common.hpp"

namespace platoon::ars {

inline constexpr double kVarianceFloor = 1e-8;

// Linear state-feedback policy (single action) with running state normalization.
struct LinearPolicy {
  std::vector<double> theta;  // p x 1
  RunningStats normalizer;

  LinearPolicy() = default;
  explicit LinearPolicy(std::size_t p) : theta(p, 0.0), normalizer(p) {}

  std::size_t dim() const { return theta.size(); }
  std::uint64_t obs_count() const { return normalizer.count(); }

  // sigma: zero until any state has been observed.
  std::vector<double> norm_mean() const {
    return obs_count() == 0 ? std::vector<double>(dim(), 0.0) : normalizer.mean();
  }
  // Sigma (diagonal): identity until any state has been observed.
  std::vector<double> norm_var() const {
    return obs_count() == 0 ? std::vector<double>(dim(), 1.0) : normalizer.variance();
  }
};

// Antithetic perturbation theta + sign * nu * direction.
struct Perturbation {
  int sign = +1;
  double noise_std = 0.0;
  std::span<const double> direction;
};

// Frozen policy used inside rollouts: perturbed weights and the normalizer
// snapshot of the current iteration, with the inverse std precomputed.
struct PolicyView {
  std::vector<double> weights;
  std::vector<double> mean;
  std::vector<double> inv_std;
  double action_min = -4.5;
  double action_max = 3.0;

  std::size_t dim() const { return weights.size(); }

  double raw_output(std::span<const double> x) const {
    if (x.size() != dim()) throw DimensionMismatch(dim(), x.size(), "policy input");
    double a = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) a += weights[i] * (x[i] - mean[i]) * inv_std[i];
    return a;
  }
  double act(std::span<const double> x) const { return std::clamp(raw_output(x), action_min, action_max); }
};

inline PolicyView make_view(const LinearPolicy& policy, std::optional<Perturbation> perturbation = std::nullopt,
                            double action_min = -4.5, double action_max = 3.0) {
  PolicyView view;
  view.weights = policy.theta;
  if (perturbation) {
    if (perturbation->direction.size() != policy.dim())
      throw DimensionMismatch(policy.dim(), perturbation->direction.size(), "perturbation direction");
    for (std::size_t i = 0; i < policy.dim(); ++i)
      view.weights[i] += perturbation->sign * perturbation->noise_std * perturbation->direction[i];
  }
  view.mean = policy.norm_mean();
  const auto var = policy.norm_var();
  view.inv_std.resize(var.size());
  for (std::size_t i = 0; i < var.size(); ++i) view.inv_std[i] = 1.0 / std::sqrt(std::max(var[i], kVarianceFloor));
  view.action_min = action_min;
  view.action_max = action_max;
  return view;
}

// Pre-clip output of (theta +/- nu*mu)^T diag(Sigma)^(-1/2) (x - sigma).
inline double policy_output(const LinearPolicy& policy, std::span<const double> x,
                            std::optional<Perturbation> perturbation = std::nullopt) {
  return make_view(policy, perturbation).raw_output(x);
}

// Clipped action.
inline double policy_act(const LinearPolicy& policy, std::span<const double> x,
                         std::optional<Perturbation> perturbation = std::nullopt, double action_min = -4.5,
                         double action_max = 3.0) {
  return make_view(policy, perturbation, action_min, action_max).act(x);
}

}  // namespace platoon::ars
