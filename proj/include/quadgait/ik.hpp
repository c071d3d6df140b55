#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "quadgait/math.hpp"
#include "quadgait/skeleton.hpp"

namespace quadgait {

inline constexpr double kReachTolerance = 1e-9;

struct IkSolution {
  // Local rotations keyed by joint; empty for the purely geometric solves.
  std::map<std::string, Euler, std::less<>> joint_rotations;
  // Solved chain positions, root first, effector last.
  std::vector<Vec3> joint_positions;
  bool reached = false;
  double residual = 0.0;
};

namespace detail {

struct BendFrame {
  Vec3 axis;    // unit root -> target
  Vec3 bend;    // unit, perpendicular to axis, toward the pole
  double distance;
};

inline BendFrame bend_frame(const Vec3& root, const Vec3& target, const Vec3& pole_hint) {
  const Vec3 d = target - root;
  const double dist = d.norm();
  if (!(dist > 1e-12)) throw Error("ik: target coincides with the chain root, bend plane is ambiguous");
  const Vec3 axis = d / dist;
  const Vec3 v = pole_hint - pole_hint.dot(axis) * axis;
  if (!(v.norm() > 1e-9 * std::max(1.0, pole_hint.norm())))
    throw Error("ik: pole hint is collinear with root -> target");
  return {axis, v.normalized(), dist};
}

}  // namespace detail

/// Law-of-cosines solve. The bend lies in the plane of root, target and the
/// pole direction, on the pole side. Out-of-range targets clamp to full
/// extension or full fold and report reached = false.
inline IkSolution solve_two_bone(const Vec3& root, const Vec3& target, double len_upper,
                                 double len_lower, const Vec3& pole_hint) {
  if (!(len_upper > 0.0) || !(len_lower > 0.0)) throw Error("ik: segment lengths must be > 0");
  const auto f = detail::bend_frame(root, target, pole_hint);
  const double reach = len_upper + len_lower;
  const double fold = std::abs(len_upper - len_lower);
  const double d = std::clamp(f.distance, fold, reach);

  const double cos_root =
      std::clamp((len_upper * len_upper + d * d - len_lower * len_lower) / (2.0 * len_upper * d), -1.0, 1.0);
  const double sin_root = std::sqrt(std::max(0.0, 1.0 - cos_root * cos_root));

  IkSolution s;
  const Vec3 mid = root + len_upper * (cos_root * f.axis + sin_root * f.bend);
  const Vec3 end = (d == f.distance) ? target : Vec3(root + d * f.axis);
  s.joint_positions = {root, mid, end};
  s.residual = (d == f.distance) ? (end - target).norm() : std::abs(f.distance - d);
  s.reached = s.residual < kReachTolerance;
  return s;
}

/// Interior angle at the middle joint of a solved chain.
inline double interior_angle(const Vec3& a, const Vec3& mid, const Vec3& b) {
  const Vec3 u = (a - mid).normalized(), v = (b - mid).normalized();
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

/// Length of the virtual bone spanning two segments whose shared joint is
/// held at a fixed interior angle.
inline double coupled_length(double l_mid, double l_low, double coupling_angle) {
  return std::sqrt(std::max(0.0, l_mid * l_mid + l_low * l_low - 2.0 * l_mid * l_low * std::cos(coupling_angle)));
}

/// Three-segment limb (hip -> patella -> calcaneus -> fetlock). The calcaneus
/// interior angle is locked to `coupling_angle`, collapsing patella ->
/// fetlock into one virtual bone for a two-bone solve; the calcaneus is then
/// placed in the bend plane on the side opposite the pole.
inline IkSolution solve_coupled_three_bone(const Vec3& root, const Vec3& target,
                                           const std::array<double, 3>& lengths,
                                           double coupling_angle, const Vec3& pole_hint) {
  for (double l : lengths)
    if (!(l > 0.0)) throw Error("ik: segment lengths must be > 0");
  if (!(coupling_angle > 0.0 && coupling_angle <= kPi)) throw Error("ik: coupling angle must lie in (0, pi]");
  const double virt = coupled_length(lengths[1], lengths[2], coupling_angle);
  IkSolution two = solve_two_bone(root, target, lengths[0], virt, pole_hint);
  const Vec3 patella = two.joint_positions[1];
  const Vec3 fetlock = two.joint_positions[2];

  const auto f = detail::bend_frame(root, target, pole_hint);
  const Vec3 normal = f.bend.cross(f.axis);
  const Vec3 w = (fetlock - patella) / virt;
  Vec3 perp = normal.cross(w);
  if (perp.dot(f.bend) > 0.0) perp = -perp;

  const double cos_g = std::clamp(
      (lengths[1] * lengths[1] + virt * virt - lengths[2] * lengths[2]) / (2.0 * lengths[1] * virt), -1.0, 1.0);
  const double sin_g = std::sqrt(std::max(0.0, 1.0 - cos_g * cos_g));
  const Vec3 calcaneus = patella + lengths[1] * (cos_g * w + sin_g * perp);

  IkSolution s;
  s.joint_positions = {root, patella, calcaneus, fetlock};
  s.residual = two.residual;
  s.reached = two.reached;
  return s;
}

namespace detail {

inline Vec3 orthogonal_part(const Vec3& v, const Vec3& axis) { return v - v.dot(axis) * axis; }

/// Orthonormal frame with `bone` as second column and `lateral` (made
/// perpendicular to it) as first column.
inline Mat3 bone_frame(const Vec3& bone, const Vec3& lateral_hint) {
  const Vec3 b = bone.normalized();
  Vec3 l = orthogonal_part(lateral_hint, b);
  if (l.norm() < 1e-9) {
    l = orthogonal_part(lateral_axis(), b);
    if (l.norm() < 1e-9) l = orthogonal_part(forward_axis(), b);
  }
  l.normalize();
  Mat3 f;
  f.col(0) = l;
  f.col(1) = b;
  f.col(2) = l.cross(b);
  return f;
}

}  // namespace detail

/// Converts solved world positions of a joint chain into local Euler
/// rotations. `positions[k]` is the world position of `chain[k]`; each joint
/// is turned so its child's rest offset points at the next position while the
/// rest lateral axis maps onto `lateral`.
inline std::map<std::string, Euler, std::less<>> chain_rotations(
    const Skeleton& s, const std::vector<std::string>& chain, const std::vector<Vec3>& positions,
    const Mat3& parent_orientation, const Vec3& lateral) {
  std::map<std::string, Euler, std::less<>> out;
  Mat3 parent = parent_orientation;
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    const Vec3 rest = s.joint(chain[k + 1]).rest_offset;
    const Mat3 rest_frame = detail::bone_frame(rest, lateral_axis());
    const Mat3 target_frame = detail::bone_frame(positions[k + 1] - positions[k], lateral);
    const Mat3 world = target_frame * rest_frame.transpose();
    const Euler e = to_euler_zxy(parent.transpose() * world);
    out[chain[k]] = e;
    parent = parent * to_matrix(e);
  }
  return out;
}

/// Leg solve against a foot target on the bound skeleton. Front legs use a
/// two-bone solve to the fetlock, hind legs the coupled three-bone solve; the
/// pastern (fetlock -> foot) is held vertical so the foot lands on target.
inline IkSolution solve_leg(const Skeleton& s, const LegChain& chain, const Mat3& parent_orientation,
                            const Vec3& root_pos, const Vec3& foot_target, double coupling_angle,
                            const Vec3& pole_hint) {
  const auto& names = chain.joints;
  const double pastern = s.joint(chain.foot()).rest_offset.norm();
  const Vec3 fetlock_target = foot_target + pastern * up_axis();

  IkSolution geo;
  if (names.size() == 4) {
    geo = solve_two_bone(root_pos, fetlock_target, s.joint(names[1]).rest_offset.norm(),
                         s.joint(names[2]).rest_offset.norm(), pole_hint);
  } else if (names.size() == 5) {
    geo = solve_coupled_three_bone(root_pos, fetlock_target,
                                   {s.joint(names[1]).rest_offset.norm(), s.joint(names[2]).rest_offset.norm(),
                                    s.joint(names[3]).rest_offset.norm()},
                                   coupling_angle, pole_hint);
  } else {
    throw Error("ik: leg " + std::string(to_string(chain.leg)) + " must have 4 or 5 joints");
  }

  const auto f = detail::bend_frame(root_pos, fetlock_target, pole_hint);
  const Vec3 lateral = f.bend.cross(f.axis);

  IkSolution out;
  out.joint_positions = geo.joint_positions;
  out.joint_positions.push_back(geo.joint_positions.back() - pastern * up_axis());
  out.joint_rotations = chain_rotations(s, names, out.joint_positions, parent_orientation, lateral);
  out.residual = geo.residual;
  out.reached = geo.reached;
  return out;
}

/// Per-joint bend about the chain's lateral (X) axis:
/// joint k turns by amplitude * sin(phase + k * falloff).
inline std::vector<Euler> chain_wave(int chain_len, double amplitude, double phase, double falloff) {
  if (chain_len < 1) throw Error("chain_wave: chain length must be >= 1");
  std::vector<Euler> out(static_cast<std::size_t>(chain_len));
  for (int k = 0; k < chain_len; ++k) out[static_cast<std::size_t>(k)].x = amplitude * std::sin(phase + k * falloff);
  return out;
}

}  // namespace quadgait
