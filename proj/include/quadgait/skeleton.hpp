#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "quadgait/math.hpp"

namespace quadgait {

/// Leg identifiers. The enumerator order is the tie-break order used when
/// sorting footfalls.
enum class LegId { FR = 0, FL = 1, BR = 2, BL = 3 };

inline constexpr std::array<LegId, 4> kAllLegs = {LegId::FR, LegId::FL, LegId::BR, LegId::BL};

inline constexpr std::size_t index(LegId leg) { return static_cast<std::size_t>(leg); }
inline constexpr bool is_front(LegId leg) { return leg == LegId::FR || leg == LegId::FL; }
inline constexpr bool is_right(LegId leg) { return leg == LegId::FR || leg == LegId::BR; }

inline std::string_view to_string(LegId leg) {
  switch (leg) {
    case LegId::FR: return "FR";
    case LegId::FL: return "FL";
    case LegId::BR: return "BR";
    case LegId::BL: return "BL";
  }
  return "?";
}

inline std::optional<LegId> parse_leg(std::string_view s) {
  for (LegId leg : kAllLegs)
    if (to_string(leg) == s) return leg;
  return std::nullopt;
}

struct Axes {
  bool x = true, y = true, z = true;
  friend bool operator==(const Axes&, const Axes&) = default;
};

struct Joint {
  std::string name;
  std::optional<std::string> parent;
  Vec3 rest_offset = Vec3::Zero();
  Axes dof;
  // Joint also carries a per-frame local translation (Pose::translations),
  // exported as three extra position channels.
  bool translates = false;
};

/// Joints of one leg from the girdle joint (shoulder or hip) down to the foot.
struct LegChain {
  LegId leg = LegId::FR;
  std::vector<std::string> joints;

  const std::string& root() const { return joints.front(); }
  const std::string& foot() const { return joints.back(); }
};

inline constexpr std::string_view kSpineChain = "spine";
inline constexpr std::string_view kNeckChain = "neck";
inline constexpr std::string_view kTailChain = "tail";

/// Named joint hierarchy. Immutable once built; construction never throws on
/// invariant violations so that validate() can report them.
class Skeleton {
 public:
  Skeleton() = default;

  Skeleton(std::vector<Joint> joints, std::array<LegChain, 4> legs,
           std::map<std::string, std::vector<std::string>, std::less<>> chains = {})
      : joints_(std::move(joints)), legs_(std::move(legs)), chains_(std::move(chains)) {
    for (std::size_t i = 0; i < joints_.size(); ++i) index_.try_emplace(joints_[i].name, i);
    parents_.resize(joints_.size(), -1);
    for (std::size_t i = 0; i < joints_.size(); ++i) {
      if (!joints_[i].parent) continue;
      if (auto it = index_.find(*joints_[i].parent); it != index_.end())
        parents_[i] = static_cast<int>(it->second);
    }
  }

  const std::vector<Joint>& joints() const { return joints_; }
  std::size_t size() const { return joints_.size(); }
  const std::array<LegChain, 4>& legs() const { return legs_; }
  const LegChain& leg(LegId id) const { return legs_[index(id)]; }
  const std::map<std::string, std::vector<std::string>, std::less<>>& chains() const {
    return chains_;
  }

  const std::vector<std::string>& chain(std::string_view name) const {
    auto it = chains_.find(name);
    if (it == chains_.end()) throw Error("skeleton has no chain '" + std::string(name) + "'");
    return it->second;
  }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const Joint& joint(std::string_view name) const {
    auto i = find(name);
    if (!i) throw Error("unknown joint '" + std::string(name) + "'");
    return joints_[*i];
  }

  /// Index of the parent joint, -1 for the root or an unresolvable parent.
  int parent_index(std::size_t i) const { return parents_[i]; }

  bool is_ancestor(std::size_t ancestor, std::size_t joint) const {
    for (int p = parents_[joint]; p >= 0; p = parents_[static_cast<std::size_t>(p)]) {
      if (static_cast<std::size_t>(p) == ancestor) return true;
      if (static_cast<std::size_t>(p) >= joint) break;  // cycle guard for invalid input
    }
    return false;
  }

  /// Children of joint i in storage order.
  std::vector<std::size_t> children(std::size_t i) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < joints_.size(); ++j)
      if (parents_[j] == static_cast<int>(i)) out.push_back(j);
    return out;
  }

  std::size_t root_index() const {
    for (std::size_t i = 0; i < joints_.size(); ++i)
      if (!joints_[i].parent) return i;
    throw Error("skeleton has no root joint");
  }

 private:
  std::vector<Joint> joints_;
  std::array<LegChain, 4> legs_{};
  std::map<std::string, std::vector<std::string>, std::less<>> chains_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<int> parents_;
};

/// Segment lengths (scene units) and chain joint counts of the quadruped
/// template. Defaults are horse proportions in meters.
struct TemplateConfig {
  int spine_joints = 5;
  int neck_joints = 3;
  int tail_joints = 5;

  double spine_length = 1.0;    // pelvis to the last spine joint
  double sternum_drop = 0.15;   // last spine joint down to the sternum
  double neck_length = 0.6;
  double neck_rise = 0.96;      // radians above horizontal
  double head_length = 0.25;
  double muzzle_length = 0.45;
  double tail_length = 0.6;

  double shoulder_drop = 0.10;
  double shoulder_half_width = 0.18;
  double front_upper = 0.55;    // shoulder -> carpus
  double front_lower = 0.50;    // carpus -> fetlock
  double front_pastern = 0.12;  // fetlock -> foot

  double hip_drop = 0.15;
  double hip_half_width = 0.20;
  double hind_upper = 0.45;     // hip -> patella
  double hind_middle = 0.45;    // patella -> calcaneus
  double hind_lower = 0.40;     // calcaneus -> fetlock
  double hind_pastern = 0.12;   // fetlock -> foot

  friend bool operator==(const TemplateConfig&, const TemplateConfig&) = default;
};

namespace detail {

inline void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(std::string("template config: ") + field + " must be > 0");
}

inline std::string sided(std::string_view base, bool right) {
  return std::string(base) + (right ? "_R" : "_L");
}

}  // namespace detail

/// Builds the quadruped template: root "pelvis" at the hip girdle, a spine
/// chain forward to the front leg frame, a sternum carrying the shoulders,
/// neck/head, tail, front legs shoulder -> carpus -> fetlock -> foot and hind
/// legs hip -> patella -> calcaneus -> fetlock -> foot.
inline Skeleton build_quadruped_template(const TemplateConfig& c = {}) {
  if (c.spine_joints < 3) throw Error("template config: spine_joints must be >= 3");
  if (c.neck_joints < 2) throw Error("template config: neck_joints must be >= 2");
  if (c.tail_joints < 3) throw Error("template config: tail_joints must be >= 3");
  const std::pair<double, const char*> lengths[] = {
      {c.spine_length, "spine_length"},   {c.sternum_drop, "sternum_drop"},
      {c.neck_length, "neck_length"},     {c.head_length, "head_length"},
      {c.muzzle_length, "muzzle_length"}, {c.tail_length, "tail_length"},
      {c.shoulder_drop, "shoulder_drop"}, {c.shoulder_half_width, "shoulder_half_width"},
      {c.front_upper, "front_upper"},     {c.front_lower, "front_lower"},
      {c.front_pastern, "front_pastern"}, {c.hip_drop, "hip_drop"},
      {c.hip_half_width, "hip_half_width"}, {c.hind_upper, "hind_upper"},
      {c.hind_middle, "hind_middle"},     {c.hind_lower, "hind_lower"},
      {c.hind_pastern, "hind_pastern"}};
  for (const auto& [v, name] : lengths) detail::require_positive(v, name);
  if (!std::isfinite(c.neck_rise)) throw Error("template config: neck_rise must be finite");

  std::vector<Joint> joints;
  auto add = [&](std::string name, std::optional<std::string> parent, Vec3 offset) {
    joints.push_back(Joint{std::move(name), std::move(parent), offset, {}, false});
  };
  std::map<std::string, std::vector<std::string>, std::less<>> chains;
  const Vec3 down = -up_axis();

  add("pelvis", std::nullopt, Vec3::Zero());

  std::vector<std::string> spine;
  std::string prev = "pelvis";
  for (int i = 1; i <= c.spine_joints; ++i) {
    std::string name = "spine_" + std::to_string(i);
    add(name, prev, forward_axis() * (c.spine_length / c.spine_joints));
    spine.push_back(name);
    prev = name;
  }
  const std::string spine_end = prev;
  chains.emplace(std::string(kSpineChain), spine);

  add("sternum", spine_end, down * c.sternum_drop);
  joints.back().translates = true;

  std::vector<std::string> neck;
  prev = spine_end;
  const Vec3 neck_dir = std::sin(c.neck_rise) * up_axis() + std::cos(c.neck_rise) * forward_axis();
  for (int i = 1; i <= c.neck_joints; ++i) {
    std::string name = "neck_" + std::to_string(i);
    add(name, prev, neck_dir * (c.neck_length / c.neck_joints));
    neck.push_back(name);
    prev = name;
  }
  chains.emplace(std::string(kNeckChain), neck);
  add("head", prev, neck_dir * c.head_length);
  add("muzzle", "head", (forward_axis() - 0.4 * up_axis()).normalized() * c.muzzle_length);

  std::vector<std::string> tail;
  prev = "pelvis";
  const Vec3 tail_dir = (-forward_axis() - 0.3 * up_axis()).normalized();
  for (int i = 1; i <= c.tail_joints; ++i) {
    std::string name = "tail_" + std::to_string(i);
    add(name, prev, tail_dir * (c.tail_length / c.tail_joints));
    tail.push_back(name);
    prev = name;
  }
  chains.emplace(std::string(kTailChain), tail);

  std::array<LegChain, 4> legs;
  for (LegId leg : kAllLegs) {
    const bool right = is_right(leg);
    const double side = right ? -1.0 : 1.0;
    LegChain chain{leg, {}};
    if (is_front(leg)) {
      const auto shoulder = detail::sided("shoulder", right);
      const auto carpus = detail::sided("carpus", right);
      const auto fetlock = detail::sided("front_fetlock", right);
      const auto foot = detail::sided("front_foot", right);
      add(shoulder, "sternum", side * c.shoulder_half_width * lateral_axis() + down * c.shoulder_drop);
      add(carpus, shoulder, down * c.front_upper);
      add(fetlock, carpus, down * c.front_lower);
      add(foot, fetlock, down * c.front_pastern);
      chain.joints = {shoulder, carpus, fetlock, foot};
    } else {
      const auto hip = detail::sided("hip", right);
      const auto patella = detail::sided("patella", right);
      const auto calcaneus = detail::sided("calcaneus", right);
      const auto fetlock = detail::sided("hind_fetlock", right);
      const auto foot = detail::sided("hind_foot", right);
      add(hip, "pelvis", side * c.hip_half_width * lateral_axis() + down * c.hip_drop);
      add(patella, hip, down * c.hind_upper);
      add(calcaneus, patella, down * c.hind_middle);
      add(fetlock, calcaneus, down * c.hind_lower);
      add(foot, fetlock, down * c.hind_pastern);
      chain.joints = {hip, patella, calcaneus, fetlock, foot};
    }
    legs[index(leg)] = std::move(chain);
  }

  return Skeleton(std::move(joints), std::move(legs), std::move(chains));
}

namespace detail {

inline void check_path(const Skeleton& s, const std::vector<std::string>& names,
                       const std::string& label, std::vector<std::string>& out) {
  if (names.empty()) {
    out.push_back(label + " is empty");
    return;
  }
  std::optional<std::size_t> prev;
  for (const auto& n : names) {
    auto i = s.find(n);
    if (!i) {
      out.push_back(label + " references unknown joint '" + n + "'");
      return;
    }
    if (prev && s.parent_index(*i) != static_cast<int>(*prev)) {
      out.push_back(label + " is not a connected descending path at joint '" + n + "'");
      return;
    }
    prev = i;
  }
}

}  // namespace detail

/// Returns every violated Skeleton invariant as a human-readable message.
inline std::vector<std::string> validate(const Skeleton& s) {
  std::vector<std::string> out;
  const auto& joints = s.joints();

  std::unordered_map<std::string, std::size_t> first_seen;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    auto [it, inserted] = first_seen.try_emplace(joints[i].name, i);
    if (!inserted) out.push_back("duplicate joint name '" + joints[i].name + "'");
  }

  std::size_t roots = 0;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const Joint& j = joints[i];
    if (!j.parent) {
      ++roots;
      continue;
    }
    auto p = s.find(*j.parent);
    if (!p) {
      out.push_back("joint '" + j.name + "' has unknown parent '" + *j.parent + "'");
      continue;
    }
    if (*p >= i) out.push_back("joint '" + j.name + "' is listed before its parent '" + *j.parent + "'");
    if (!(j.rest_offset.norm() > 0.0))
      out.push_back("joint '" + j.name + "' has a zero-length rest offset");
  }
  if (roots != 1) out.push_back("skeleton must have exactly one root, found " + std::to_string(roots));

  for (LegId leg : kAllLegs) {
    const LegChain& chain = s.leg(leg);
    std::string label = "leg " + std::string(to_string(leg));
    if (chain.leg != leg) out.push_back(label + " descriptor is tagged " + std::string(to_string(chain.leg)));
    detail::check_path(s, chain.joints, label, out);
  }

  for (std::string_view name : {kSpineChain, kNeckChain, kTailChain}) {
    auto it = s.chains().find(name);
    if (it == s.chains().end()) {
      out.push_back("missing chain '" + std::string(name) + "'");
      continue;
    }
    detail::check_path(s, it->second, "chain " + std::string(name), out);
  }

  // The spine must start below the back leg frame and carry the front legs.
  auto spine_it = s.chains().find(kSpineChain);
  if (spine_it != s.chains().end() && !spine_it->second.empty()) {
    auto first = s.find(spine_it->second.front());
    auto last = s.find(spine_it->second.back());
    if (first && last) {
      for (LegId leg : kAllLegs) {
        const auto& lj = s.leg(leg).joints;
        if (lj.empty()) continue;
        auto root = s.find(lj.front());
        if (!root) continue;
        if (is_front(leg)) {
          if (!s.is_ancestor(*last, *root))
            out.push_back("front leg " + std::string(to_string(leg)) + " does not hang from the spine end");
        } else {
          const int frame = s.parent_index(*root);
          if (frame < 0 || !(s.is_ancestor(static_cast<std::size_t>(frame), *first)))
            out.push_back("spine does not start at the back leg frame of " + std::string(to_string(leg)));
        }
      }
    }
  }
  return out;
}

/// Local joint state for one frame: a root translation, Euler rotations for
/// any subset of joints (missing = identity) and local translation deltas for
/// joints flagged `translates`.
struct Pose {
  Vec3 root_translation = Vec3::Zero();
  std::map<std::string, Euler, std::less<>> rotations;
  std::map<std::string, Vec3, std::less<>> translations;

  friend bool operator==(const Pose& a, const Pose& b) {
    return a.root_translation == b.root_translation && a.rotations == b.rotations &&
           a.translations == b.translations;
  }

  Euler rotation(std::string_view joint) const {
    auto it = rotations.find(joint);
    return it == rotations.end() ? Euler{} : it->second;
  }
};

struct JointTransform {
  Vec3 position = Vec3::Zero();
  Mat3 orientation = Mat3::Identity();
};

struct WorldPose {
  std::map<std::string, JointTransform, std::less<>> transforms;

  const JointTransform& at(std::string_view joint) const {
    auto it = transforms.find(joint);
    if (it == transforms.end()) throw Error("world pose has no joint '" + std::string(joint) + "'");
    return it->second;
  }
  const Vec3& position(std::string_view joint) const { return at(joint).position; }
};

/// Resolves a pose parent-before-child. A joint's rotation turns the offsets
/// of its children; the root sits at root_translation + its rest offset.
inline WorldPose local_to_world(const Skeleton& s, const Pose& pose) {
  for (const auto& [name, e] : pose.rotations) {
    if (!s.find(name)) throw Error("pose references unknown joint '" + name + "'");
    if (!e.is_finite()) throw Error("pose rotation of joint '" + name + "' is not finite");
  }
  for (const auto& [name, t] : pose.translations)
    if (!s.find(name)) throw Error("pose references unknown joint '" + name + "'");

  const auto& joints = s.joints();
  std::vector<JointTransform> xf(joints.size());
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const Joint& j = joints[i];
    Vec3 offset = j.rest_offset;
    if (auto it = pose.translations.find(j.name); it != pose.translations.end()) offset += it->second;
    Mat3 local = Mat3::Identity();
    if (auto it = pose.rotations.find(j.name); it != pose.rotations.end()) local = to_matrix(it->second);

    const int p = s.parent_index(i);
    if (p < 0) {
      xf[i].position = pose.root_translation + offset;
      xf[i].orientation = local;
    } else {
      const JointTransform& parent = xf[static_cast<std::size_t>(p)];
      xf[i].position = parent.position + parent.orientation * offset;
      xf[i].orientation = parent.orientation * local;
    }
  }
  WorldPose out;
  for (std::size_t i = 0; i < joints.size(); ++i) out.transforms.emplace(joints[i].name, xf[i]);
  return out;
}

}  // namespace quadgait
