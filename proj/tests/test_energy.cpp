#include <gtest/gtest.h>

#include <random>

#include "platoon/energy/ev_energy.hpp"

using namespace platoon;
using namespace platoon::energy;

namespace {

EvParams lossless() {
  EvParams p;
  p.drag_coeff = 0;
  p.roll_coeff = 0;
  return p;
}

}  // namespace

TEST(Energy, StandingStillCostsNothing) { EXPECT_DOUBLE_EQ(step_energy(0, 0, 1, EvParams{}), 0.0); }

TEST(Energy, AccelerationExample) {
  // 0 -> 10 m/s, 1600 kg, no losses, 90 % drive efficiency.
  const double wh = step_energy(0, 10, 1, lossless());
  EXPECT_NEAR(wh, 0.5 * 1600 * 100 / 0.9 / 3600.0, 1e-12);
  EXPECT_NEAR(wh, 24.69, 5e-3);
}

TEST(Energy, RecoveryExample) {
  auto p = lossless();
  p.recuperation_eff = 0.5;
  const double wh = step_energy(10, 0, 1, p);
  EXPECT_NEAR(wh, -0.5 * 1600 * 100 * 0.5 / 3600.0, 1e-12);
  EXPECT_NEAR(wh, -11.11, 5e-3);
}

TEST(Energy, CruiseLossClosedForm) {
  const EvParams p;
  const double per_second = (0.5 * 1.225 * 2.5 * 0.29 * 1000.0 + 0.012 * 1600 * 9.81 * 10.0) / 0.9 / 3600.0;
  double total = 0.0;
  for (int i = 0; i < 100; ++i) total += step_energy(10, 10, 1, p);
  EXPECT_NEAR(total, 100 * per_second, 1e-9);
}

TEST(Energy, AuxiliaryPowerAdds) {
  EvParams p;
  p.aux_power = 360.0;
  EXPECT_NEAR(step_energy(0, 0, 10, p), 1.0, 1e-12);
}

TEST(Energy, SymmetricCycleWithPerfectRecoveryIsZero) {
  auto p = lossless();
  p.propulsion_eff = 1.0;
  p.recuperation_eff = 1.0;
  double total = 0;
  const double speeds[] = {0, 3, 7, 12, 7, 3, 0};
  for (int i = 1; i < 7; ++i) total += step_energy(speeds[i - 1], speeds[i], 1, p);
  EXPECT_NEAR(total, 0.0, 1e-12);
}

TEST(Energy, ConservationBound) {
  auto p = lossless();
  p.propulsion_eff = 1.0;
  p.recuperation_eff = 1.0;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 13.88);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(200);
    for (auto& x : v) x = u(rng);
    double total = 0;
    for (std::size_t i = 1; i < v.size(); ++i) total += step_energy(v[i - 1], v[i], 1, p);
    const double expected = 0.5 * p.mass * (v.back() * v.back() - v.front() * v.front()) / 3600.0;
    EXPECT_NEAR(total, expected, 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Energy, LessRecoveryNeverCheaper) {
  EvParams none, full;
  none.recuperation_eff = 0.0;
  full.recuperation_eff = 1.0;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 13.88);
  double e_none = 0, e_full = 0;
  double prev = u(rng);
  for (int i = 0; i < 1000; ++i) {
    const double next = u(rng);
    e_none += step_energy(prev, next, 1, none);
    e_full += step_energy(prev, next, 1, full);
    prev = next;
  }
  EXPECT_GE(e_none, e_full);
}

TEST(Energy, LossesNonNegative) {
  const EvParams p;
  for (double v = 0; v < 20; v += 0.5) EXPECT_GE(resistive_loss_j(v, 1.0, p), 0.0);
}

TEST(Energy, RecoveredNeverExceedsDemand) {
  EvParams p;
  p.recuperation_eff = 1.0;
  p.aux_power = 0;
  for (double v = 1; v < 14; v += 1) {
    const double demand_j = 0.5 * p.mass * (0 - v * v) + resistive_loss_j(v / 2, 1, p);
    EXPECT_GE(step_energy(v, 0, 1, p) * 3600.0, -std::abs(demand_j) - 1e-9);
  }
}

TEST(EvParams, Validation) {
  EvParams p;
  EXPECT_NO_THROW(p.validate());
  p.mass = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.propulsion_eff = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.recuperation_eff = 1.2;
  EXPECT_THROW(p.validate(), ConfigError);
}
