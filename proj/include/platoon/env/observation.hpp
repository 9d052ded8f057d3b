#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "platoon/traffic/world.hpp"

namespace platoon::env {

// Fill values used when no leader is within range.
struct LeaderDefaults {
  double range = 500.0;     // chi_x [m]
  double speed_diff = 13.88; // chi_v [m/s]
  double accel_diff = 7.5;   // chi_a [m/s^2]
};

// Offsets into the flat state vector:
//   [d, v | x_1, v_1, ..., x_n, v_n | dx, dv, da | RT, onehot(phase_dim)]
struct ObservationLayout {
  std::size_t platoon_size = 0;
  std::size_t phase_dim = 8;

  std::size_t ego_offset() const { return 0; }
  std::size_t hdv_offset() const { return 2; }
  std::size_t leader_offset() const { return 2 + 2 * platoon_size; }
  std::size_t signal_offset() const { return leader_offset() + 3; }
  std::size_t onehot_offset() const { return signal_offset() + 1; }
  std::size_t dim() const { return onehot_offset() + phase_dim; }
};

inline std::size_t observation_dim(std::size_t platoon_size, std::size_t phase_dim) {
  return ObservationLayout{platoon_size, phase_dim}.dim();
}

struct Observation {
  ObservationLayout layout;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  std::span<const double> span() const { return values; }

  double distance_to_line() const { return values[0]; }
  double ego_speed() const { return values[1]; }
  double hdv_position(std::size_t i) const { return values[layout.hdv_offset() + 2 * i]; }
  double hdv_speed(std::size_t i) const { return values[layout.hdv_offset() + 2 * i + 1]; }
  double leader_dx() const { return values[layout.leader_offset()]; }
  double leader_dv() const { return values[layout.leader_offset() + 1]; }
  double leader_da() const { return values[layout.leader_offset() + 2]; }
  double remaining_time() const { return values[layout.signal_offset()]; }
  std::span<const double> phase_onehot() const {
    return std::span<const double>(values).subspan(layout.onehot_offset(), layout.phase_dim);
  }
};

// Flattens the world into the MDP state. Requires the ego platoon on the lane.
inline Observation build_observation(const traffic::World& world, const LeaderDefaults& chi) {
  const auto& cfg = world.config();
  Observation obs;
  obs.layout = {static_cast<std::size_t>(cfg.platoon_size),
                static_cast<std::size_t>(world.signal().encoding_dim())};
  obs.values.assign(obs.layout.dim(), 0.0);

  const auto& vehicles = world.vehicles();
  const std::size_t ego_idx = world.ego_index();
  const auto& ego = vehicles[ego_idx];
  obs.values[0] = std::clamp(cfg.lane_length - ego.position, 0.0, cfg.lane_length);
  obs.values[1] = ego.speed;

  const auto& ids = world.platoon_ids();
  for (std::size_t k = 1; k < ids.size(); ++k) {
    const auto& hdv = vehicles[*world.index_of(ids[k])];
    obs.values[obs.layout.hdv_offset() + 2 * (k - 1)] = hdv.position;
    obs.values[obs.layout.hdv_offset() + 2 * (k - 1) + 1] = hdv.speed;
  }

  const std::size_t lo = obs.layout.leader_offset();
  bool leader_in_range = false;
  if (ego_idx > 0) {
    const auto& lead = vehicles[ego_idx - 1];
    const double dx = lead.position - ego.position;
    if (dx <= chi.range) {
      leader_in_range = true;
      obs.values[lo] = dx;
      obs.values[lo + 1] = lead.speed - ego.speed;
      obs.values[lo + 2] = lead.accel - ego.accel;
    }
  }
  if (!leader_in_range) {
    obs.values[lo] = chi.range;
    obs.values[lo + 1] = chi.speed_diff;
    obs.values[lo + 2] = chi.accel_diff;
  }

  const auto sig = world.signal_now();
  obs.values[obs.layout.signal_offset()] = sig.remaining;
  obs.values[obs.layout.onehot_offset() + static_cast<std::size_t>(sig.encoded_index())] = 1.0;
  return obs;
}

}  // namespace platoon::env
