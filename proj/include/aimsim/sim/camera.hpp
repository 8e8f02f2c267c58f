#pragma once

#include <algorithm>
#include <stdexcept>

#include "aimsim/sim/geometry.hpp"

namespace aimsim::sim {

inline constexpr double kPitchLimit = 89.0;
inline constexpr double kCmPerInch = 2.54;

/// Degrees of view rotation per mouse count for a given physical distance
/// per full turn and mouse resolution.
inline double mouse_sensitivity(double cmPer360, double dpi) {
  if (!(cmPer360 > 0.0) || !(dpi > 0.0))
    throw std::invalid_argument("mouse_sensitivity: cmPer360 and dpi must be > 0");
  return 360.0 / ((cmPer360 / kCmPerInch) * dpi);
}

struct CameraState {
  double yaw = 0.0;    // [0, 360)
  double pitch = 0.0;  // [-89, 89]
  Vec3 position{};

  Vec3 view_direction() const { return direction_from(yaw, pitch); }

  friend bool operator==(const CameraState&, const CameraState&) = default;
};

/// yaw += dx * sens (wrapped), pitch -= dy * sens (clamped): positive dy
/// looks down, as with a mouse pulled toward the player.
inline CameraState apply_mouse(CameraState camera, long long dx, long long dy, double sens) {
  camera.yaw = wrap360(camera.yaw + static_cast<double>(dx) * sens);
  camera.pitch = std::clamp(camera.pitch - static_cast<double>(dy) * sens, -kPitchLimit, kPitchLimit);
  return camera;
}

}  // namespace aimsim::sim
