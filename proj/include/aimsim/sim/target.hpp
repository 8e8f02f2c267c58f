#pragma once

#include <cmath>

#include "aimsim/experiment.hpp"
#include "aimsim/rng.hpp"
#include "aimsim/sim/geometry.hpp"

namespace aimsim::sim {

/// Target kinematics on a sphere around the player. Times are measured on
/// the target's own clock, which starts at 0 when it spawns.
struct TargetState {
  double azimuth = 0.0;        // deg
  double elevation = 0.0;      // deg
  double distance = 1.0;       // world units
  double visualRadius = 0.5;   // world units
  double angularSpeed = 0.0;   // deg/s
  double headingAngle = 0.0;   // deg; 0 = increasing azimuth, 90 = increasing elevation
  double nextMotionChange = 0.0;
  double jumpOffset = 0.0;     // world units above the sphere
  double jumpVelocity = 0.0;   // world units/s
  double nextJump = 0.0;
  double health = 1.0;

  bool airborne() const { return jumpOffset > 0.0 || jumpVelocity > 0.0; }

  friend bool operator==(const TargetState&, const TargetState&) = default;
};

inline double draw(const Range& r, Rng& rng) { return rng.uniform(r.min, r.max); }

namespace detail {

inline void draw_motion(TargetState& s, const TargetMotionSpec& spec, Rng& rng) {
  s.angularSpeed = draw(spec.speed, rng);
  s.headingAngle = spec.horizontalLock ? (rng.coin() ? 180.0 : 0.0) : rng.uniform(0.0, 360.0);
}

}  // namespace detail

inline TargetState spawn_target(const TargetMotionSpec& spec, double health, Rng& rng) {
  TargetState s;
  s.azimuth = draw(spec.spawnAzimuth, rng);
  s.elevation = draw(spec.spawnElevation, rng);
  s.distance = draw(spec.distance, rng);
  s.visualRadius = draw(spec.visualRadius, rng);
  detail::draw_motion(s, spec, rng);
  s.nextMotionChange = draw(spec.motionChangePeriod, rng);
  s.nextJump = draw(spec.jumpPeriod, rng);
  s.health = health;
  return s;
}

/// Advances the target by dt. Motion and jump schedules are checked against
/// `now` (target clock at the start of the step) before integrating.
inline TargetState update_target(TargetState s, const TargetMotionSpec& spec, double dt, double now, Rng& rng) {
  if (now >= s.nextMotionChange) {
    detail::draw_motion(s, spec, rng);
    s.nextMotionChange = now + draw(spec.motionChangePeriod, rng);
  }

  if (s.angularSpeed > 0.0) {
    const double step = s.angularSpeed * dt;
    if (spec.horizontalLock) {
      s.azimuth = wrap360(s.azimuth + (s.headingAngle == 180.0 ? -step : step));
    } else {
      // Rotate along the great circle through the current position in the
      // heading direction, then re-express the heading in the new local frame.
      const double az = deg_to_rad(s.azimuth);
      const double el = deg_to_rad(s.elevation);
      const double h = deg_to_rad(s.headingAngle);
      const Vec3 p = direction_from(s.azimuth, s.elevation);
      const Vec3 east{-std::sin(az), std::cos(az), 0.0};
      const Vec3 north{-std::sin(el) * std::cos(az), -std::sin(el) * std::sin(az), std::cos(el)};
      const Vec3 t = std::cos(h) * east + std::sin(h) * north;
      const double theta = deg_to_rad(step);
      const Vec3 p2 = std::cos(theta) * p + std::sin(theta) * t;
      const Vec3 t2 = std::cos(theta) * t + (-std::sin(theta)) * p;
      const double az2 = std::atan2(p2.y, p2.x);
      const double el2 = std::asin(std::clamp(p2.z, -1.0, 1.0));
      const Vec3 east2{-std::sin(az2), std::cos(az2), 0.0};
      const Vec3 north2{-std::sin(el2) * std::cos(az2), -std::sin(el2) * std::sin(az2), std::cos(el2)};
      s.azimuth = wrap360(rad_to_deg(az2));
      s.elevation = rad_to_deg(el2);
      s.headingAngle = wrap360(rad_to_deg(std::atan2(dot(t2, north2), dot(t2, east2))));
    }
  }

  if (spec.jumpEnabled) {
    if (!s.airborne() && now >= s.nextJump) {
      s.jumpVelocity = draw(spec.jumpSpeed, rng);
      s.nextJump = now + draw(spec.jumpPeriod, rng);
    }
    if (s.airborne()) {
      // Exact under constant gravity, so sampled heights lie on the parabola.
      s.jumpOffset += s.jumpVelocity * dt - 0.5 * spec.gravity * dt * dt;
      s.jumpVelocity -= spec.gravity * dt;
      if (s.jumpOffset <= 0.0) {
        s.jumpOffset = 0.0;
        s.jumpVelocity = 0.0;
      }
    }
  }
  return s;
}

inline Vec3 target_world_position(const TargetState& s, const Vec3& origin) {
  return origin + s.distance * direction_from(s.azimuth, s.elevation) + Vec3{0.0, 0.0, s.jumpOffset};
}

}  // namespace aimsim::sim
