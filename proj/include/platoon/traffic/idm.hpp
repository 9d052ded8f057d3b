#pragma once

#include <cmath>
#include <optional>
#include <sstream>

#include "platoon/common.hpp"
#include "platoon/traffic/vehicle.hpp"

namespace platoon::traffic {

// Intelligent Driver Model parameters. `comfort_decel` is a positive magnitude.
struct IdmParams {
  double max_accel = 3.0;       // a0 [m/s^2]
  double desired_speed = 13.88; // v0 [m/s]
  double min_gap = 2.0;         // s0 [m]
  double time_headway = 1.0;    // T [s]
  double comfort_decel = 2.8;   // b [m/s^2]
  double delta = 4.0;           // speed-term exponent; 1 gives the linear form

  void validate() const {
    if (!(max_accel > 0)) throw ConfigError("idm.max_accel_mps2 must be > 0");
    if (!(desired_speed > 0)) throw ConfigError("idm.desired_speed_mps must be > 0");
    if (!(min_gap >= 0)) throw ConfigError("idm.min_gap_m must be >= 0");
    if (!(time_headway >= 0)) throw ConfigError("idm.time_headway_s must be >= 0");
    if (!(comfort_decel > 0)) throw ConfigError("idm.comfort_decel_mps2 must be > 0");
    if (!(delta >= 1)) throw ConfigError("idm.delta must be >= 1");
  }

  // Desired dynamic gap s*(v, dv).
  double desired_gap(double speed, double approach_rate) const {
    return min_gap + time_headway * speed +
           speed * approach_rate / (2.0 * std::sqrt(max_accel * comfort_decel));
  }
};

// Bumper-to-bumper gap from follower front to leader rear.
inline double bumper_gap(const VehicleState& follower, const VehicleState& leader) {
  return leader.position - leader.length - follower.position;
}

inline double speed_term(double ratio, double delta) {
  if (delta == 4.0) {
    const double r2 = ratio * ratio;
    return r2 * r2;
  }
  if (delta == 1.0) return ratio;
  return std::pow(ratio, delta);
}

// Unclamped IDM acceleration. The caller clamps to the vehicle's accel box.
inline double idm_acceleration(const VehicleState& follower, const std::optional<VehicleState>& leader,
                               const IdmParams& p) {
  const double v = follower.speed;
  const double free_term = 1.0 - speed_term(v / p.desired_speed, p.delta);
  if (!leader) return p.max_accel * free_term;

  const double gap = bumper_gap(follower, *leader);
  if (!(gap > 0.0)) {
    std::ostringstream msg;
    msg << "non-positive gap " << gap << " m between vehicle " << follower.id << " at "
        << follower.position << " m and leader " << leader->id << " at " << leader->position << " m";
    throw CollisionError(msg.str());
  }
  const double s_star = p.desired_gap(v, v - leader->speed);
  const double ratio = s_star / gap;
  return p.max_accel * (free_term - ratio * ratio);
}

}  // namespace platoon::traffic
