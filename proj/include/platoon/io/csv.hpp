#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "platoon/ars/ars.hpp"
#include "platoon/common.hpp"
#include "platoon/traffic/world.hpp"

namespace platoon::io {

// Shortest representation that parses back to the same double, so metrics
// recomputed from an exported file match the in-memory values bit for bit.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Simple table: header plus rows of pre-formatted cells.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvTable& row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::invalid_argument("CsvTable: row width differs from header");
    rows_.push_back(std::move(cells));
    return *this;
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  void write(std::ostream& os) const {
    write_line(os, header_);
    for (const auto& r : rows_) write_line(os, r);
  }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline const std::vector<std::string>& trajectory_header() {
  static const std::vector<std::string> h{"time_s",    "vehicle_id", "class",     "position_m",        "speed_mps",
                                          "accel_mps2", "energy_wh",  "signal_phase", "signal_remaining_s"};
  return h;
}

inline void write_trajectory_csv(std::ostream& os, const std::vector<traffic::TrajectoryRow>& rows) {
  const auto& h = trajectory_header();
  for (std::size_t i = 0; i < h.size(); ++i) os << (i ? "," : "") << h[i];
  os << '\n';
  for (const auto& r : rows) {
    os << format_double(r.time) << ',' << r.vehicle_id << ',' << traffic::to_string(r.cls) << ','
       << format_double(r.position) << ',' << format_double(r.speed) << ',' << format_double(r.accel) << ','
       << format_double(r.energy_wh) << ',' << r.signal_phase << ',' << format_double(r.signal_remaining) << '\n';
  }
}

inline std::vector<traffic::TrajectoryRow> read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("trajectory csv: empty input");
  if (split_csv_line(line) != trajectory_header()) throw std::runtime_error("trajectory csv: unexpected header");
  std::vector<traffic::TrajectoryRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    auto bad = [&](const char* what) {
      return std::runtime_error("trajectory csv line " + std::to_string(lineno) + ": bad " + what);
    };
    if (f.size() != 9) throw bad("column count");
    traffic::TrajectoryRow r;
    auto num = [&](const std::string& s, const char* what) {
      auto v = parse_double(s);
      if (!v) throw bad(what);
      return *v;
    };
    auto integer = [&](const std::string& s, const char* what) {
      auto v = parse_int(s);
      if (!v) throw bad(what);
      return static_cast<int>(*v);
    };
    r.time = num(f[0], "time_s");
    r.vehicle_id = integer(f[1], "vehicle_id");
    auto cls = traffic::vehicle_class_from_string(f[2]);
    if (!cls) throw bad("class");
    r.cls = *cls;
    r.position = num(f[3], "position_m");
    r.speed = num(f[4], "speed_mps");
    r.accel = num(f[5], "accel_mps2");
    r.energy_wh = num(f[6], "energy_wh");
    r.signal_phase = integer(f[7], "signal_phase");
    r.signal_remaining = num(f[8], "signal_remaining_s");
    rows.push_back(r);
  }
  return rows;
}

inline void write_training_curve_csv(std::ostream& os, const std::vector<ars::IterationReport>& reports) {
  os << "iteration,mean_reward,smoothed_reward,eval_reward,update_norm\n";
  for (const auto& r : reports) {
    os << r.iteration << ',' << format_double(r.mean_reward) << ',' << format_double(r.smoothed_reward) << ','
       << (r.eval_reward ? format_double(*r.eval_reward) : std::string()) << ',' << format_double(r.update_norm)
       << '\n';
  }
}

inline std::vector<ars::IterationReport> read_training_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "iteration,mean_reward,smoothed_reward,eval_reward,update_norm")
    throw std::runtime_error("training curve csv: unexpected header");
  std::vector<ars::IterationReport> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw std::runtime_error("training curve csv: bad column count");
    ars::IterationReport r;
    auto it = parse_int(f[0]);
    auto mean = parse_double(f[1]);
    auto sm = parse_double(f[2]);
    auto norm = parse_double(f[4]);
    if (!it || !mean || !sm || !norm) throw std::runtime_error("training curve csv: bad number");
    r.iteration = static_cast<int>(*it);
    r.mean_reward = *mean;
    r.smoothed_reward = *sm;
    r.update_norm = *norm;
    if (!f[3].empty()) {
      auto ev = parse_double(f[3]);
      if (!ev) throw std::runtime_error("training curve csv: bad eval_reward");
      r.eval_reward = *ev;
    }
    out.push_back(r);
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace platoon::io
