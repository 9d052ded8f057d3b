#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "platoon/common.hpp"
#include "platoon/energy/ev_energy.hpp"
#include "platoon/traffic/idm.hpp"
#include "platoon/traffic/signal.hpp"
#include "platoon/traffic/vehicle.hpp"

namespace platoon::traffic {

struct WorldConfig {
  double lane_length = 500.0;   // L [m], stop line position
  double speed_limit = 13.88;   // V_max [m/s]
  double hourly_volume = 400.0; // background demand [veh/h]
  double preload_min = 180.0;   // [s]
  double preload_max = 220.0;   // [s]
  int platoon_size = 3;         // following HDVs behind the ego
  double dt = 1.0;              // [s]
  std::uint64_t rng_seed = 0;
  double vehicle_length = 5.0;  // [m]
  double accel_min = -4.5;      // [m/s^2]
  double accel_max = 3.0;       // [m/s^2]
  double exit_zone = 150.0;     // background vehicles leave this far past the stop line [m]

  void validate() const {
    if (!(lane_length > 0)) throw ConfigError("world.lane_length_m must be > 0");
    if (!(speed_limit > 0)) throw ConfigError("world.speed_limit_mps must be > 0");
    if (!(hourly_volume >= 0)) throw ConfigError("world.hourly_volume_vph must be >= 0");
    if (!(preload_min >= 0 && preload_min <= preload_max))
      throw ConfigError("world.preload_min_s/preload_max_s: need 0 <= low <= high");
    if (platoon_size < 0) throw ConfigError("world.platoon_size must be >= 0");
    if (!(dt > 0)) throw ConfigError("world.dt_s must be > 0");
    if (!(vehicle_length > 0)) throw ConfigError("world.vehicle_length_m must be > 0");
    if (!(accel_min < 0 && accel_max > 0)) throw ConfigError("world: need accel_min < 0 < accel_max");
    if (!(exit_zone >= 0)) throw ConfigError("world.exit_zone_m must be >= 0");
  }
};

// One row of the trajectory log.
struct TrajectoryRow {
  double time = 0.0;
  int vehicle_id = 0;
  VehicleClass cls = VehicleClass::BackgroundHDV;
  double position = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double energy_wh = 0.0;
  int signal_phase = 0;  // one-hot slot of the active interval
  double signal_remaining = 0.0;
};

// Interpolated instant at which a front bumper moving linearly from x_prev to
// x_new during [t_prev, t_prev + dt] reaches the stop line.
inline double crossing_instant(double t_prev, double dt, double x_prev, double x_new, double stop_line) {
  return t_prev + dt * (stop_line - x_prev) / (x_new - x_prev);
}

// Distance covered while braking at |accel_min| under semi-implicit Euler.
inline double discrete_stopping_distance(double speed, double accel_min, double dt) {
  double d = 0.0;
  double v = speed;
  while (v > 0.0) {
    v = std::max(0.0, v + accel_min * dt);
    d += v * dt;
  }
  return d;
}

// Single-lane approach to a fixed-time signal. Vehicles are kept ordered
// front (closest to / past the stop line) to back.
class World {
 public:
  World(WorldConfig cfg, IdmParams idm, SignalProgram signal, energy::EvParams ev)
      : cfg_(cfg), idm_(idm), signal_(std::move(signal)), ev_(ev), rng_(cfg.rng_seed) {
    cfg_.validate();
    idm_.validate();
    signal_.validate();
    ev_.validate();
    next_arrival_ = draw_headway();
  }

  const WorldConfig& config() const { return cfg_; }
  const IdmParams& idm() const { return idm_; }
  const SignalProgram& signal() const { return signal_; }
  const energy::EvParams& ev() const { return ev_; }

  double time() const { return time_; }
  const std::vector<VehicleState>& vehicles() const { return vehicles_; }
  SignalState signal_now() const { return signal_.query(time_); }

  std::uint64_t spawned_count() const { return spawned_; }
  std::uint64_t pending_spawns() const { return pending_; }
  const std::vector<int>& red_light_crossers() const { return red_crossers_; }

  bool has_platoon() const { return !platoon_ids_.empty(); }
  // Ego first, then HDV_1 .. HDV_n.
  const std::vector<int>& platoon_ids() const { return platoon_ids_; }
  double platoon_injected_at() const { return injected_at_; }

  std::optional<std::size_t> index_of(int id) const {
    for (std::size_t i = 0; i < vehicles_.size(); ++i)
      if (vehicles_[i].id == id) return i;
    return std::nullopt;
  }
  std::size_t ego_index() const {
    if (!has_platoon()) throw LifecycleError("no ego platoon on the lane");
    return *index_of(platoon_ids_.front());
  }
  const VehicleState& ego() const { return vehicles_[ego_index()]; }

  bool platoon_all_crossed() const {
    if (!has_platoon()) return false;
    for (int id : platoon_ids_) {
      auto idx = index_of(id);
      if (!idx || !vehicles_[*idx].crossed_at) return false;
    }
    return true;
  }

  // True when the signal obliges a vehicle at this state to stop before the line.
  bool must_stop(const VehicleState& v, const SignalState& s) const {
    if (v.position >= cfg_.lane_length || s.approach_proceed) return false;
    const double dist = cfg_.lane_length - v.position;
    if (s.is_yellow && dist <= v.speed * s.remaining) return false;
    // Cannot stop before the line even at full braking: proceed.
    return discrete_stopping_distance(v.speed, cfg_.accel_min, cfg_.dt) <= dist;
  }

  std::optional<VehicleState> effective_leader(std::size_t idx) const { return effective_leader(idx, signal_now()); }

  std::optional<VehicleState> effective_leader(std::size_t idx, const SignalState& s) const {
    const VehicleState& v = vehicles_[idx];
    std::optional<VehicleState> leader;
    if (idx > 0) leader = vehicles_[idx - 1];
    if (must_stop(v, s)) {
      // Keep whichever obstacle demands the harder braking; a leader that is
      // closer but driving through the junction must not pull us across.
      VehicleState stop = stop_line_leader(cfg_.lane_length);
      if (!leader || idm_acceleration(v, stop, idm_) <= idm_acceleration(v, *leader, idm_)) leader = stop;
    }
    return leader;
  }

  double clamp_accel(double a) const { return std::clamp(a, cfg_.accel_min, cfg_.accel_max); }

  // IDM acceleration toward the effective leader, clamped to the accel box.
  double idm_accel(std::size_t idx) const { return idm_accel(idx, signal_now()); }
  double idm_accel(std::size_t idx, const SignalState& s) const {
    return clamp_accel(idm_acceleration(vehicles_[idx], effective_leader(idx, s), idm_));
  }

  // Arrival process. Arrivals are queued until the origin has room.
  void spawn_background() {
    if (cfg_.hourly_volume <= 0.0) return;
    while (next_arrival_ <= time_) {
      ++pending_;
      next_arrival_ += draw_headway();
    }
    if (pending_ > 0 && origin_clear()) {
      VehicleState v;
      v.id = next_id_++;
      v.cls = VehicleClass::BackgroundHDV;
      v.position = 0.0;
      v.speed = cfg_.speed_limit;
      v.length = cfg_.vehicle_length;
      vehicles_.push_back(v);
      --pending_;
      ++spawned_;
      if (logging_) log_vehicle(vehicles_.back(), signal_now());
    }
  }

  // Advances one dt. `ego_accel` is only used when a platoon is present.
  void step(double ego_accel) {
    spawn_background();
    integrate(ego_accel);
  }

  // Warms the lane with background traffic for t_p ~ U(preload range), then
  // injects the platoon at the origin. Returns the drawn t_p.
  double preload() {
    std::uniform_real_distribution<double> dist(cfg_.preload_min, cfg_.preload_max);
    const double tp = cfg_.preload_max > cfg_.preload_min ? dist(rng_) : cfg_.preload_min;
    const auto steps = static_cast<long long>(std::llround(tp / cfg_.dt));
    for (long long k = 0; k < steps; ++k) step(0.0);
    // Hold further arrivals in the queue until the platoon fits.
    while (!origin_clear()) integrate(0.0);
    inject_platoon();
    return tp;
  }

  void inject_platoon() {
    if (has_platoon()) throw LifecycleError("platoon already injected");
    const double spacing = cfg_.vehicle_length + idm_.min_gap + idm_.time_headway * cfg_.speed_limit;
    for (int k = 0; k <= cfg_.platoon_size; ++k) {
      VehicleState v;
      v.id = next_id_++;
      v.cls = k == 0 ? VehicleClass::EgoCAV : VehicleClass::PlatoonHDV;
      v.position = -k * spacing;
      v.speed = cfg_.speed_limit;
      v.length = cfg_.vehicle_length;
      vehicles_.push_back(v);
      platoon_ids_.push_back(v.id);
    }
    injected_at_ = time_;
    if (logging_) log_snapshot();
  }

  // Direct placement for tests and scripted scenarios. Keeps front-to-back order.
  void place_vehicle(VehicleState v) {
    if (v.id == 0) v.id = next_id_++;
    else next_id_ = std::max(next_id_, v.id + 1);
    auto it = std::find_if(vehicles_.begin(), vehicles_.end(),
                           [&](const VehicleState& o) { return o.position < v.position; });
    vehicles_.insert(it, v);
    if (v.cls == VehicleClass::EgoCAV) platoon_ids_.insert(platoon_ids_.begin(), v.id);
    else if (v.cls == VehicleClass::PlatoonHDV) platoon_ids_.push_back(v.id);
    if (v.cls != VehicleClass::BackgroundHDV) injected_at_ = time_;
  }

  void set_logging(bool on) { logging_ = on; }
  bool logging() const { return logging_; }
  const std::vector<TrajectoryRow>& log() const { return log_; }
  void clear_log() { log_.clear(); }
  // Appends the current state of every vehicle to the log.
  void log_snapshot() {
    const SignalState s = signal_now();
    for (const auto& v : vehicles_) log_vehicle(v, s);
  }

 private:
  double draw_headway() {
    if (cfg_.hourly_volume <= 0.0) return std::numeric_limits<double>::infinity();
    std::exponential_distribution<double> exp(cfg_.hourly_volume / 3600.0);
    return exp(rng_);
  }

  // Insertion at the origin needs the rearmost vehicle at least the IDM
  // desired gap away (never less than s0 + T * V_max).
  bool origin_clear() const {
    if (vehicles_.empty()) return true;
    const VehicleState& rear = vehicles_.back();
    const double gap = rear.position - rear.length;
    const double vmax = cfg_.speed_limit;
    const double need = std::max(idm_.min_gap + idm_.time_headway * vmax, idm_.desired_gap(vmax, vmax - rear.speed));
    return gap >= need;
  }

  void integrate(double ego_accel) {
    const SignalState s = signal_now();
    const double dt = cfg_.dt;
    const double stop_line = cfg_.lane_length;
    const int ego_id = has_platoon() ? platoon_ids_.front() : kStopLineId;

    // Accelerations from the pre-update snapshot, leaders first.
    accel_buf_.resize(vehicles_.size());
    for (std::size_t i = 0; i < vehicles_.size(); ++i)
      accel_buf_[i] = vehicles_[i].id == ego_id ? clamp_accel(ego_accel) : idm_accel(i, s);

    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      VehicleState& v = vehicles_[i];
      const double v_prev = v.speed;
      const double x_prev = v.position;
      const double v_new = std::clamp(v_prev + accel_buf_[i] * dt, 0.0, cfg_.speed_limit);
      v.accel = (v_new - v_prev) / dt;
      v.speed = v_new;
      v.position = x_prev + v_new * dt;
      v.energy_wh += energy::step_energy(v_prev, v_new, dt, ev_);
      if (!v.crossed_at && x_prev < stop_line && v.position >= stop_line) {
        v.crossed_at = crossing_instant(time_, dt, x_prev, v.position, stop_line);
        if (!s.approach_proceed && !s.is_yellow) red_crossers_.push_back(v.id);
      }
    }
    time_ += dt;

    std::erase_if(vehicles_, [&](const VehicleState& v) {
      return v.cls == VehicleClass::BackgroundHDV && v.position > stop_line + cfg_.exit_zone;
    });

    for (std::size_t i = 1; i < vehicles_.size(); ++i) {
      const double gap = bumper_gap(vehicles_[i], vehicles_[i - 1]);
      if (!(gap > 0.0)) {
        std::ostringstream msg;
        msg << "collision at t=" << time_ << ": vehicle " << vehicles_[i].id << " overlaps vehicle "
            << vehicles_[i - 1].id << " (gap " << gap << " m)";
        throw CollisionError(msg.str());
      }
    }

    if (logging_) {
      const SignalState after = signal_now();
      for (const auto& v : vehicles_) log_vehicle(v, after);
    }
  }

  void log_vehicle(const VehicleState& v, const SignalState& s) {
    log_.push_back({time_, v.id, v.cls, v.position, v.speed, v.accel, v.energy_wh, s.encoded_index(), s.remaining});
  }

  WorldConfig cfg_;
  IdmParams idm_;
  SignalProgram signal_;
  energy::EvParams ev_;
  std::mt19937_64 rng_;

  double time_ = 0.0;
  std::vector<VehicleState> vehicles_;
  int next_id_ = 1;
  double next_arrival_ = 0.0;
  std::uint64_t pending_ = 0;
  std::uint64_t spawned_ = 0;
  std::vector<int> platoon_ids_;
  double injected_at_ = 0.0;
  std::vector<int> red_crossers_;
  std::vector<double> accel_buf_;
  bool logging_ = false;
  std::vector<TrajectoryRow> log_;
};

}  // namespace platoon::traffic
