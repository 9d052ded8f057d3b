#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "platoon/traffic/world.hpp"

namespace platoon::eval {

// Full-stop rule: speed below the threshold for at least `min_steps`
// consecutive samples counts as one stop.
struct StopRule {
  double speed_threshold = 0.1;
  int min_steps = 2;
};

inline int count_full_stops(std::span<const double> speeds, const StopRule& rule = {}) {
  int stops = 0;
  int run = 0;
  for (double v : speeds) {
    if (v < rule.speed_threshold) {
      if (++run == rule.min_steps) ++stops;
    } else {
      run = 0;
    }
  }
  return stops;
}

// Platoon-level result of one episode. Vehicles are ordered ego first.
struct EpisodeOutcome {
  std::vector<int> vehicle_ids;
  std::vector<double> delay_s;
  std::vector<double> energy_wh;
  std::vector<int> stops;
  std::vector<bool> crossed;
  double t0 = 0.0;

  std::size_t size() const { return vehicle_ids.size(); }
  double total_energy() const { return std::accumulate(energy_wh.begin(), energy_wh.end(), 0.0); }
  double mean_delay() const {
    return size() == 0 ? 0.0 : std::accumulate(delay_s.begin(), delay_s.end(), 0.0) / static_cast<double>(size());
  }
  int total_stops() const { return std::accumulate(stops.begin(), stops.end(), 0); }
  bool all_crossed() const { return std::all_of(crossed.begin(), crossed.end(), [](bool c) { return c; }); }
};

struct Metrics {
  double delay_per_vehicle = 0.0;   // s, mean over platoon and episodes
  double energy_per_vehicle = 0.0;  // Wh
  double total_energy = 0.0;        // Wh per episode, platoon sum
  double full_stops = 0.0;          // platoon stops per episode
  int episodes = 0;
};

struct LaneGeometry {
  double lane_length = 500.0;
  double speed_limit = 13.88;
  double dt = 1.0;
};

// Reconstructs the platoon outcome from a trajectory log alone. Rows must be
// in time order. The episode starts at the first ego row; vehicles that never
// reach the stop line are charged up to the last logged time.
inline EpisodeOutcome outcome_from_log(std::span<const traffic::TrajectoryRow> rows, const LaneGeometry& geo,
                                       const StopRule& rule = {}) {
  using traffic::VehicleClass;
  struct Track {
    std::optional<double> crossing;
    double energy = 0.0;
    bool have_prev = false;
    double t_prev = 0.0;
    double x_prev = 0.0;
    std::vector<double> speeds;
  };
  std::map<int, Track> tracks;
  std::optional<double> t0;
  double t_end = 0.0;
  int ego_id = -1;

  for (const auto& r : rows) {
    t_end = std::max(t_end, r.time);
    if (r.cls == VehicleClass::BackgroundHDV) continue;
    if (r.cls == VehicleClass::EgoCAV) {
      ego_id = r.vehicle_id;
      if (!t0) t0 = r.time;
    }
    Track& tr = tracks[r.vehicle_id];
    if (tr.crossing) continue;
    tr.speeds.push_back(r.speed);
    tr.energy = r.energy_wh;
    if (tr.have_prev && tr.x_prev < geo.lane_length && r.position >= geo.lane_length)
      tr.crossing = traffic::crossing_instant(tr.t_prev, geo.dt, tr.x_prev, r.position, geo.lane_length);
    tr.have_prev = true;
    tr.t_prev = r.time;
    tr.x_prev = r.position;
  }

  EpisodeOutcome out;
  out.t0 = t0.value_or(0.0);
  const double free_flow = geo.lane_length / geo.speed_limit;
  auto add = [&](int id, const Track& tr) {
    out.vehicle_ids.push_back(id);
    out.delay_s.push_back(tr.crossing.value_or(t_end) - out.t0 - free_flow);
    out.energy_wh.push_back(tr.energy);
    out.stops.push_back(count_full_stops(tr.speeds, rule));
    out.crossed.push_back(tr.crossing.has_value());
  };
  if (auto it = tracks.find(ego_id); it != tracks.end()) add(it->first, it->second);
  for (const auto& [id, tr] : tracks)  // platoon HDV ids increase front to back
    if (id != ego_id) add(id, tr);
  return out;
}

inline Metrics aggregate(std::span<const EpisodeOutcome> episodes) {
  Metrics m;
  m.episodes = static_cast<int>(episodes.size());
  if (episodes.empty()) return m;
  for (const auto& e : episodes) {
    m.delay_per_vehicle += e.mean_delay();
    m.energy_per_vehicle += e.total_energy() / static_cast<double>(e.size());
    m.total_energy += e.total_energy();
    m.full_stops += e.total_stops();
  }
  const double n = static_cast<double>(episodes.size());
  m.delay_per_vehicle /= n;
  m.energy_per_vehicle /= n;
  m.total_energy /= n;
  m.full_stops /= n;
  return m;
}

inline double mean_of(std::span<const double> xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Unbiased sample variance.
inline double variance_of(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace platoon::eval
