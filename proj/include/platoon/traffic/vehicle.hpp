#pragma once

#include <optional>
#include <string_view>

namespace platoon::traffic {

enum class VehicleClass { EgoCAV, PlatoonHDV, BackgroundHDV };

inline std::string_view to_string(VehicleClass c) {
  switch (c) {
    case VehicleClass::EgoCAV: return "ego_cav";
    case VehicleClass::PlatoonHDV: return "platoon_hdv";
    case VehicleClass::BackgroundHDV: return "background_hdv";
  }
  return "unknown";
}

inline std::optional<VehicleClass> vehicle_class_from_string(std::string_view s) {
  if (s == "ego_cav") return VehicleClass::EgoCAV;
  if (s == "platoon_hdv") return VehicleClass::PlatoonHDV;
  if (s == "background_hdv") return VehicleClass::BackgroundHDV;
  return std::nullopt;
}

inline constexpr int kStopLineId = -1;

// Kinematic record of one vehicle. Position is the front bumper in meters
// from the lane origin, increasing toward the stop line.
struct VehicleState {
  int id = 0;
  VehicleClass cls = VehicleClass::BackgroundHDV;
  double position = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double length = 5.0;
  std::optional<double> crossed_at;
  double energy_wh = 0.0;

  bool in_platoon() const { return cls != VehicleClass::BackgroundHDV; }
  bool is_virtual() const { return id == kStopLineId; }
};

// Zero-length stationary obstacle placed at the stop line.
inline VehicleState stop_line_leader(double stop_line) {
  VehicleState v;
  v.id = kStopLineId;
  v.position = stop_line;
  v.length = 0.0;
  return v;
}

}  // namespace platoon::traffic
