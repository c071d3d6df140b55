#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace quadgait {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// World frame: Y up, character faces +Z, +X is the character's left.
inline Vec3 up_axis() { return Vec3::UnitY(); }
inline Vec3 forward_axis() { return Vec3::UnitZ(); }
inline Vec3 lateral_axis() { return Vec3::UnitX(); }

/// Thrown for every contract violation in the library. Messages name the
/// offending field, joint or line so callers can surface them unchanged.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Euler rotation in radians, composed as R = Rz(z) * Rx(x) * Ry(y), which
/// is the matrix a BVH "Zrotation Xrotation Yrotation" channel triple builds.
struct Euler {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Euler&, const Euler&) = default;

  bool is_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return m;
}

inline Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return m;
}

inline Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return m;
}

inline Mat3 to_matrix(const Euler& e) { return rot_z(e.z) * rot_x(e.x) * rot_y(e.y); }

/// Inverse of to_matrix. At gimbal lock (|x| = pi/2) the y angle is folded
/// into z.
inline Euler to_euler_zxy(const Mat3& r) {
  Euler e;
  const double sx = std::clamp(r(2, 1), -1.0, 1.0);
  e.x = std::asin(sx);
  if (std::abs(sx) < 1.0 - 1e-12) {
    e.z = std::atan2(-r(0, 1), r(1, 1));
    e.y = std::atan2(-r(2, 0), r(2, 2));
    // (x, y, z) and (pi - x, y + pi, z + pi) are the same rotation. Prefer
    // the one with less yaw and roll so bends past 90 degrees stay on X.
    auto signed_pi = [](double a) { return std::remainder(a, 2.0 * kPi); };
    const Euler alt{signed_pi(kPi - e.x), signed_pi(e.y + kPi), signed_pi(e.z + kPi)};
    if (std::abs(alt.y) + std::abs(alt.z) < std::abs(e.y) + std::abs(e.z)) e = alt;
  } else {
    e.y = 0.0;
    e.z = std::atan2(r(1, 0), r(0, 0));
  }
  return e;
}

inline double deg(double rad) { return rad * 180.0 / kPi; }
inline double rad(double deg) { return deg * kPi / 180.0; }

/// Wraps a value onto [0, period).
inline double wrap(double v, double period) {
  double r = std::fmod(v, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

}  // namespace quadgait
