#pragma once

#include <cmath>

#include "platoon/common.hpp"

namespace platoon::energy {

inline constexpr double kJoulesPerWh = 3600.0;

// Longitudinal-physics battery-electric vehicle. Flat road, no rotational
// inertia, separate efficiencies for traction and regenerative braking.
struct EvParams {
  double mass = 1600.0;            // kg
  double frontal_area = 2.5;       // m^2
  double drag_coeff = 0.29;
  double roll_coeff = 0.012;
  double air_density = 1.225;      // kg/m^3
  double propulsion_eff = 0.9;     // (0, 1]
  double recuperation_eff = 0.6;   // [0, 1]
  double aux_power = 0.0;          // W
  double gravity = 9.81;           // m/s^2

  void validate() const {
    if (!(mass > 0)) throw ConfigError("energy.mass_kg must be > 0");
    if (!(propulsion_eff > 0 && propulsion_eff <= 1)) throw ConfigError("energy.propulsion_eff must be in (0, 1]");
    if (!(recuperation_eff >= 0 && recuperation_eff <= 1))
      throw ConfigError("energy.recuperation_eff must be in [0, 1]");
    if (!(frontal_area >= 0 && drag_coeff >= 0 && roll_coeff >= 0 && air_density >= 0 && gravity >= 0))
      throw ConfigError("energy: resistance coefficients must be >= 0");
    if (!(aux_power >= 0)) throw ConfigError("energy.aux_power_w must be >= 0");
  }
};

// Aerodynamic plus rolling resistance work over one step at mean speed v_mean [J].
inline double resistive_loss_j(double v_mean, double dt, const EvParams& p) {
  const double drag = 0.5 * p.air_density * p.frontal_area * p.drag_coeff * v_mean * v_mean * v_mean;
  const double roll = p.roll_coeff * p.mass * p.gravity * v_mean;
  return (drag + roll) * dt;
}

// Battery draw over one step [Wh]; negative values are recovered energy.
inline double step_energy(double v_prev, double v_new, double dt, const EvParams& p) {
  const double v_mean = 0.5 * (v_prev + v_new);
  const double demand = 0.5 * p.mass * (v_new * v_new - v_prev * v_prev) + resistive_loss_j(v_mean, dt, p);
  const double aux = p.aux_power * dt;
  double draw = demand >= 0.0 ? demand / p.propulsion_eff + aux : demand * p.recuperation_eff + aux;
  if (draw < -std::abs(demand)) draw = -std::abs(demand);
  return draw / kJoulesPerWh;
}

}  // namespace platoon::energy
