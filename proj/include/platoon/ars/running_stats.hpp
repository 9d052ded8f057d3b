#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "platoon/common.hpp"

namespace platoon::ars {

// Per-dimension running mean and (population) variance. Welford updates for
// single samples, Chan's pairwise formula for merging batches, so the result
// does not depend on how samples were partitioned.
class RunningStats {
 public:
  RunningStats() = default;
  explicit RunningStats(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

  std::size_t dim() const { return mean_.size(); }
  std::uint64_t count() const { return count_; }
  const std::vector<double>& mean() const { return mean_; }

  std::vector<double> variance() const {
    std::vector<double> var(dim(), 0.0);
    if (count_ == 0) return var;
    for (std::size_t i = 0; i < dim(); ++i) var[i] = m2_[i] / static_cast<double>(count_);
    return var;
  }

  void push(std::span<const double> x) {
    if (x.size() != dim()) throw DimensionMismatch(dim(), x.size(), "running statistics sample");
    ++count_;
    const double n = static_cast<double>(count_);
    for (std::size_t i = 0; i < dim(); ++i) {
      const double delta = x[i] - mean_[i];
      mean_[i] += delta / n;
      m2_[i] += delta * (x[i] - mean_[i]);
    }
  }

  void merge(const RunningStats& other) {
    if (other.count_ == 0) return;
    if (other.dim() != dim()) throw DimensionMismatch(dim(), other.dim(), "running statistics merge");
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    for (std::size_t i = 0; i < dim(); ++i) {
      const double delta = other.mean_[i] - mean_[i];
      mean_[i] += delta * nb / n;
      m2_[i] += other.m2_[i] + delta * delta * na * nb / n;
    }
    count_ += other.count_;
  }

  // Restores a state written by a checkpoint.
  static RunningStats from_moments(std::vector<double> mean, const std::vector<double>& variance, std::uint64_t count) {
    RunningStats s(mean.size());
    s.mean_ = std::move(mean);
    s.count_ = count;
    for (std::size_t i = 0; i < s.dim(); ++i) s.m2_[i] = variance[i] * static_cast<double>(count);
    return s;
  }

 private:
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::uint64_t count_ = 0;
};

}  // namespace platoon::ars
