#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "quadgait/math.hpp"
#include "quadgait/skeleton.hpp"

namespace quadgait {

enum class Channel { RotX, RotY, RotZ, TransX, TransY, TransZ };
enum class BlendMode { Additive, Replace };

inline std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::RotX: return "rotX";
    case Channel::RotY: return "rotY";
    case Channel::RotZ: return "rotZ";
    case Channel::TransX: return "transX";
    case Channel::TransY: return "transY";
    case Channel::TransZ: return "transZ";
  }
  return "?";
}

inline std::optional<Channel> parse_channel(std::string_view s) {
  for (Channel c : {Channel::RotX, Channel::RotY, Channel::RotZ, Channel::TransX, Channel::TransY, Channel::TransZ})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

inline std::string_view to_string(BlendMode m) { return m == BlendMode::Additive ? "additive" : "replace"; }

inline std::optional<BlendMode> parse_blend_mode(std::string_view s) {
  if (s == "additive") return BlendMode::Additive;
  if (s == "replace") return BlendMode::Replace;
  return std::nullopt;
}

struct Key {
  double frame = 0.0;
  double value = 0.0;  // radians for rotation channels, scene units otherwise
  friend bool operator==(const Key&, const Key&) = default;
};

struct OverrideTrack {
  std::string joint;
  Channel channel = Channel::RotX;
  std::vector<Key> keys;
  BlendMode mode = BlendMode::Additive;
  double weight = 1.0;
  friend bool operator==(const OverrideTrack&, const OverrideTrack&) = default;
};

struct AnimLayer {
  std::vector<OverrideTrack> tracks;
  bool enabled = true;
  friend bool operator==(const AnimLayer&, const AnimLayer&) = default;
};

/// Throws on unordered keys, out-of-range weight or duplicate (joint, channel).
inline void validate(const OverrideTrack& t) {
  if (!(t.weight >= 0.0 && t.weight <= 1.0))
    throw Error("track " + t.joint + "." + std::string(to_string(t.channel)) + ": weight must lie in [0, 1]");
  for (std::size_t i = 1; i < t.keys.size(); ++i)
    if (!(t.keys[i].frame > t.keys[i - 1].frame))
      throw Error("track " + t.joint + "." + std::string(to_string(t.channel)) +
                  ": key frames must be strictly increasing");
}

inline void validate(const AnimLayer& layer) {
  std::set<std::pair<std::string, Channel>> seen;
  for (const auto& t : layer.tracks) {
    validate(t);
    if (!seen.emplace(t.joint, t.channel).second)
      throw Error("layer has more than one track for " + t.joint + "." + std::string(to_string(t.channel)));
  }
}

/// Linear between bracketing keys, constant outside the key range.
inline double sample_track(const OverrideTrack& track, double tf) {
  const auto& k = track.keys;
  if (k.empty()) throw Error("track " + track.joint + "." + std::string(to_string(track.channel)) + " has no keys");
  if (tf <= k.front().frame) return k.front().value;
  if (tf >= k.back().frame) return k.back().value;
  auto hi = std::upper_bound(k.begin(), k.end(), tf, [](double f, const Key& key) { return f < key.frame; });
  auto lo = hi - 1;
  const double u = (tf - lo->frame) / (hi->frame - lo->frame);
  return std::lerp(lo->value, hi->value, u);
}

namespace detail {

inline double& channel_ref(Pose& pose, const Skeleton& s, const std::string& joint, Channel c) {
  const bool is_root = !s.joint(joint).parent;
  switch (c) {
    case Channel::RotX: return pose.rotations[joint].x;
    case Channel::RotY: return pose.rotations[joint].y;
    case Channel::RotZ: return pose.rotations[joint].z;
    case Channel::TransX: return is_root ? pose.root_translation.x() : pose.translations[joint].x();
    case Channel::TransY: return is_root ? pose.root_translation.y() : pose.translations[joint].y();
    case Channel::TransZ: return is_root ? pose.root_translation.z() : pose.translations[joint].z();
  }
  throw Error("bad channel");
}

}  // namespace detail

/// Blends the user layer over a base pose. Translation channels on the root
/// drive root_translation; on other joints they drive the local translation
/// delta. Weight-0 tracks are skipped so the base passes through untouched.
inline Pose apply_layer(const Pose& base, const AnimLayer& layer, double tf, const Skeleton& s) {
  for (const auto& t : layer.tracks) {
    if (!s.find(t.joint)) throw Error("layer track references unknown joint '" + t.joint + "'");
    const Joint& j = s.joint(t.joint);
    const bool translation = t.channel == Channel::TransX || t.channel == Channel::TransY || t.channel == Channel::TransZ;
    if (translation && j.parent && !j.translates)
      throw Error("layer track " + t.joint + "." + std::string(to_string(t.channel)) +
                  ": joint has no translation channels");
  }
  if (!layer.enabled) return base;
  validate(layer);
  Pose out = base;
  for (const auto& t : layer.tracks) {
    if (t.weight == 0.0) continue;
    const double v = sample_track(t, tf);
    double& ch = detail::channel_ref(out, s, t.joint, t.channel);
    if (t.mode == BlendMode::Additive)
      ch += t.weight * v;
    else
      ch = (1.0 - t.weight) * ch + t.weight * v;
  }
  return out;
}

}  // namespace quadgait
