#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "platoon/common.hpp"

namespace platoon::traffic {

struct SignalPhase {
  double green_s = 30.0;
  std::set<int> movements;
};

struct SignalState {
  int phase = 0;
  bool is_yellow = false;
  double remaining = 0.0;
  bool approach_proceed = false;

  // Slot in the one-hot phase encoding: each green and its trailing yellow
  // get distinct slots.
  int encoded_index() const { return 2 * phase + (is_yellow ? 1 : 0); }

  friend bool operator==(const SignalState&, const SignalState&) = default;
};

// Fixed-time signal: every green phase is followed by a yellow interval.
// Phase 0 begins at `offset_s`.
class SignalProgram {
 public:
  SignalProgram() = default;
  SignalProgram(std::vector<SignalPhase> phases, double yellow_s, double offset_s, int approach_movement)
      : phases_(std::move(phases)), yellow_s_(yellow_s), offset_s_(offset_s), approach_(approach_movement) {
    validate();
  }

  // Four 30 s greens, 3 s yellow each; the ego approach is served by phase 0.
  static SignalProgram standard_four_phase() {
    std::vector<SignalPhase> p;
    for (int i = 0; i < 4; ++i) p.push_back({30.0, {i}});
    return SignalProgram(std::move(p), 3.0, 0.0, 0);
  }

  // Approach green forever (for tests without signal interaction).
  static SignalProgram always_green(double period_s = 1.0e6) {
    return SignalProgram({{period_s, {0}}}, 0.0, 0.0, 0);
  }

  void validate() const {
    if (phases_.empty()) throw ConfigError("signal: at least one phase required");
    for (const auto& ph : phases_)
      if (!(ph.green_s > 0)) throw ConfigError("signal.green_s: every green duration must be > 0");
    if (!(yellow_s_ >= 0)) throw ConfigError("signal.yellow_s must be >= 0");
    if (!std::isfinite(offset_s_)) throw ConfigError("signal.offset_s must be finite");
  }

  const std::vector<SignalPhase>& phases() const { return phases_; }
  double yellow_s() const { return yellow_s_; }
  double offset_s() const { return offset_s_; }
  int approach_movement() const { return approach_; }
  int phase_count() const { return static_cast<int>(phases_.size()); }
  int encoding_dim() const { return 2 * phase_count(); }

  double cycle_length() const {
    double c = 0.0;
    for (const auto& ph : phases_) c += ph.green_s + yellow_s_;
    return c;
  }

  bool serves_approach(int phase) const { return phases_[phase].movements.count(approach_) > 0; }

  SignalState query(double t) const {
    const double cycle = cycle_length();
    double tc = std::fmod(t - offset_s_, cycle);
    if (tc < 0) tc += cycle;
    double start = 0.0;
    for (int i = 0; i < phase_count(); ++i) {
      const double green_end = start + phases_[i].green_s;
      if (tc < green_end) return {i, false, green_end - tc, serves_approach(i)};
      const double yellow_end = green_end + yellow_s_;
      if (tc < yellow_end) return {i, true, yellow_end - tc, false};
      start = yellow_end;
    }
    // tc rounded up to the cycle length: treat as the cycle start.
    return {0, false, phases_[0].green_s, serves_approach(0)};
  }

  // Time from t until the start of the next green interval serving the
  // approach, strictly after the current interval.
  double next_green_start(double t) const {
    const SignalState now = query(t);
    double wait = now.remaining;
    int idx = now.phase;
    bool yellow = now.is_yellow;
    for (int guard = 0; guard < 2 * phase_count() + 2; ++guard) {
      if (!yellow) {
        yellow = true;
        wait += yellow_s_;
        continue;
      }
      idx = (idx + 1) % phase_count();
      yellow = false;
      if (serves_approach(idx)) return wait;
      wait += phases_[idx].green_s;
    }
    return std::numeric_limits<double>::infinity();
  }

  // 0 while an approach green is active, otherwise next_green_start(t).
  double time_to_next_green(double t) const { return query(t).approach_proceed ? 0.0 : next_green_start(t); }

 private:
  std::vector<SignalPhase> phases_{{30.0, {0}}};
  double yellow_s_ = 3.0;
  double offset_s_ = 0.0;
  int approach_ = 0;
};

}  // namespace platoon::traffic
