#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "platoon/ars/ars.hpp"
#include "platoon/io/csv.hpp"
#include "platoon/traffic/world.hpp"

namespace platoon::eval {

enum class BandState { Green, Yellow, Red };

inline const char* to_string(BandState s) {
  switch (s) {
    case BandState::Green: return "green";
    case BandState::Yellow: return "yellow";
    case BandState::Red: return "red";
  }
  return "red";
}

// Interval of constant approach signal state, [start, end).
struct SignalBand {
  double start = 0.0;
  double end = 0.0;
  BandState state = BandState::Red;
};

inline BandState band_state(int encoded_slot, int approach_phase) {
  if (encoded_slot / 2 != approach_phase) return BandState::Red;
  return encoded_slot % 2 ? BandState::Yellow : BandState::Green;
}

// Signal bands recovered from the logged one-hot slot of each sample time.
inline std::vector<SignalBand> signal_bands(const std::vector<traffic::TrajectoryRow>& rows, double dt,
                                            int approach_phase = 0) {
  std::map<double, int> slot_at;
  for (const auto& r : rows) slot_at.emplace(r.time, r.signal_phase);
  std::vector<SignalBand> bands;
  for (const auto& [t, slot] : slot_at) {
    const BandState s = band_state(slot, approach_phase);
    if (!bands.empty() && bands.back().state == s && std::abs(bands.back().end - t) < 1e-9) {
      bands.back().end = t + dt;
    } else {
      bands.push_back({t, t + dt, s});
    }
  }
  return bands;
}

inline io::CsvTable signal_band_table(const std::vector<SignalBand>& bands) {
  io::CsvTable t({"start_s", "end_s", "state"});
  for (const auto& b : bands) t.row({io::format_double(b.start), io::format_double(b.end), to_string(b.state)});
  return t;
}

namespace detail {

struct Frame {
  double x0, x1, y0, y1;        // data ranges
  double left = 70, top = 30, width = 760, height = 440;
  double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

inline void axes(std::ostringstream& svg, const Frame& f, const std::string& xlabel, const std::string& ylabel,
                 const std::string& title) {
  svg << "<rect x='" << f.left << "' y='" << f.top << "' width='" << f.width << "' height='" << f.height
      << "' fill='none' stroke='#333'/>\n";
  svg << "<text x='" << f.left + f.width / 2 << "' y='" << f.top + f.height + 40
      << "' text-anchor='middle' font-size='13'>" << xlabel << "</text>\n";
  svg << "<text x='18' y='" << f.top + f.height / 2 << "' text-anchor='middle' font-size='13' transform='rotate(-90 18 "
      << f.top + f.height / 2 << ")'>" << ylabel << "</text>\n";
  svg << "<text x='" << f.left + f.width / 2 << "' y='18' text-anchor='middle' font-size='14'>" << title << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 5.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 5.0;
    svg << "<text x='" << f.px(xv) << "' y='" << f.top + f.height + 18 << "' text-anchor='middle' font-size='11'>"
        << std::lround(xv) << "</text>\n";
    svg << "<text x='" << f.left - 6 << "' y='" << f.py(yv) + 4 << "' text-anchor='end' font-size='11'>"
        << std::lround(yv) << "</text>\n";
  }
}

inline const char* band_colour(BandState s) {
  switch (s) {
    case BandState::Green: return "#2ca02c";
    case BandState::Yellow: return "#f0c000";
    case BandState::Red: return "#d62728";
  }
  return "#d62728";
}

}  // namespace detail

// Time-space diagram: one polyline per vehicle, the stop line drawn as a bar
// coloured by the approach signal state.
inline std::string time_space_svg(const std::vector<traffic::TrajectoryRow>& rows, double lane_length, double dt,
                                  const std::string& title, int approach_phase = 0) {
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='860' height='530' font-family='sans-serif'>\n";
  if (rows.empty()) {
    svg << "<text x='20' y='40'>no data</text>\n</svg>\n";
    return svg.str();
  }
  double t0 = rows.front().time, t1 = rows.front().time;
  double ymin = 0.0;
  for (const auto& r : rows) {
    t0 = std::min(t0, r.time);
    t1 = std::max(t1, r.time);
    if (r.cls != traffic::VehicleClass::BackgroundHDV) ymin = std::min(ymin, r.position);
  }
  if (t1 <= t0) t1 = t0 + dt;
  detail::Frame f{t0, t1, ymin, lane_length + 60.0};
  detail::axes(svg, f, "time [s]", "position [m]", title);

  for (const auto& b : signal_bands(rows, dt, approach_phase)) {
    svg << "<line x1='" << f.px(b.start) << "' y1='" << f.py(lane_length) << "' x2='" << f.px(std::min(b.end, t1))
        << "' y2='" << f.py(lane_length) << "' stroke='" << detail::band_colour(b.state) << "' stroke-width='5'/>\n";
  }

  std::map<int, std::vector<const traffic::TrajectoryRow*>> tracks;
  for (const auto& r : rows) tracks[r.vehicle_id].push_back(&r);
  for (const auto& [id, pts] : tracks) {
    const auto cls = pts.front()->cls;
    const char* colour = cls == traffic::VehicleClass::EgoCAV        ? "#1f5fbf"
                         : cls == traffic::VehicleClass::PlatoonHDV ? "#ff7f0e"
                                                                     : "#9a9a9a";
    svg << "<polyline fill='none' stroke='" << colour << "' stroke-width='"
        << (cls == traffic::VehicleClass::BackgroundHDV ? 1 : 2) << "' points='";
    for (const auto* p : pts) {
      const double y = std::clamp(p->position, f.y0, f.y1);
      svg << f.px(p->time) << ',' << f.py(y) << ' ';
    }
    svg << "'/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

inline std::string training_curve_svg(const std::vector<ars::IterationReport>& reports, const std::string& title) {
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='860' height='530' font-family='sans-serif'>\n";
  if (reports.empty()) {
    svg << "<text x='20' y='40'>no data</text>\n</svg>\n";
    return svg.str();
  }
  double lo = reports.front().mean_reward, hi = lo;
  for (const auto& r : reports) {
    lo = std::min({lo, r.mean_reward, r.smoothed_reward});
    hi = std::max({hi, r.mean_reward, r.smoothed_reward});
    if (r.eval_reward) {
      lo = std::min(lo, *r.eval_reward);
      hi = std::max(hi, *r.eval_reward);
    }
  }
  if (hi <= lo) hi = lo + 1.0;
  const double last = std::max(1.0, static_cast<double>(reports.back().iteration));
  detail::Frame f{0.0, last, lo, hi};
  detail::axes(svg, f, "iteration", "reward", title);
  auto line = [&](const char* colour, auto value) {
    svg << "<polyline fill='none' stroke='" << colour << "' stroke-width='1.5' points='";
    for (const auto& r : reports)
      if (auto v = value(r)) svg << f.px(r.iteration) << ',' << f.py(*v) << ' ';
    svg << "'/>\n";
  };
  line("#c8c8c8", [](const ars::IterationReport& r) { return std::optional<double>(r.mean_reward); });
  line("#1f5fbf", [](const ars::IterationReport& r) { return std::optional<double>(r.smoothed_reward); });
  line("#2ca02c", [](const ars::IterationReport& r) { return r.eval_reward; });
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace platoon::eval
