#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aimsim::sim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) { return (1.0 / norm(v)) * v; }

inline constexpr double deg_to_rad(double d) { return d * (std::numbers::pi / 180.0); }
inline constexpr double rad_to_deg(double r) { return r * (180.0 / std::numbers::pi); }

/// Wraps an angle in degrees to [0, 360).
inline double wrap360(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w = 0.0;
  return w;
}

/// Wraps an angle in degrees to [-180, 180).
inline double wrap180(double deg) { return wrap360(deg + 180.0) - 180.0; }

/// Unit vector for an azimuth/elevation pair (degrees). Azimuth 0 is +x,
/// 90 is +y; elevation 90 is +z.
inline Vec3 direction_from(double azimuthDeg, double elevationDeg) {
  const double az = deg_to_rad(azimuthDeg);
  const double el = deg_to_rad(elevationDeg);
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

/// Great-circle angle between two unit vectors, in degrees.
inline double angle_between(const Vec3& a, const Vec3& b) {
  // atan2 form stays accurate for tiny angles where acos does not.
  const Vec3 c{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
  return rad_to_deg(std::atan2(norm(c), dot(a, b)));
}

/// Ray/sphere test. Hits include the grazing boundary case and rays that
/// start inside the sphere; spheres entirely behind the origin miss.
inline bool ray_sphere_hit(const Vec3& origin, const Vec3& direction, const Vec3& center, double radius) {
  if (std::abs(norm(direction) - 1.0) > 1e-9) throw std::invalid_argument("ray direction is not a unit vector");
  if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be > 0");
  const Vec3 oc = center - origin;
  const double tca = dot(oc, direction);
  const double d2 = dot(oc, oc) - tca * tca;
  const double r2 = radius * radius;
  if (d2 > r2) return false;
  const double thc = std::sqrt(std::max(0.0, r2 - d2));
  return tca + thc >= 0.0;
}

}  // namespace aimsim::sim
