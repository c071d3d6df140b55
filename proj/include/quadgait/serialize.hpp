#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "quadgait/clip.hpp"
#include "quadgait/gait.hpp"
#include "quadgait/layer.hpp"
#include "quadgait/skeleton.hpp"

namespace quadgait {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

namespace detail {

template <class T>
struct Field {
  const char* name;
  double T::*member;
};

inline const std::vector<Field<GaitParams>>& gait_fields() {
  static const std::vector<Field<GaitParams>> f = {
      {"motion_frequency", &GaitParams::motion_frequency},
      {"counter_gait_error", &GaitParams::counter_gait_error},
      {"joint_error", &GaitParams::joint_error},
      {"spine_oscillation", &GaitParams::spine_oscillation},
      {"body_height", &GaitParams::body_height},
      {"bounce", &GaitParams::bounce},
      {"head_high", &GaitParams::head_high},
      {"head_pos", &GaitParams::head_pos},
      {"head_oscillation", &GaitParams::head_oscillation},
      {"head_amplitude", &GaitParams::head_amplitude},
      {"tail_swing", &GaitParams::tail_swing},
      {"tail_amplitude", &GaitParams::tail_amplitude},
      {"phase_falloff", &GaitParams::phase_falloff},
      {"stride_length", &GaitParams::stride_length},
      {"hind_coupling_angle", &GaitParams::hind_coupling_angle},
  };
  return f;
}

inline const std::vector<Field<LegParams>>& leg_fields() {
  static const std::vector<Field<LegParams>> f = {
      {"impact_phase", &LegParams::impact_phase},
      {"impact_duration", &LegParams::impact_duration},
      {"leg_oscillation", &LegParams::leg_oscillation},
      {"leg_cycle", &LegParams::leg_cycle},
      {"step_height", &LegParams::step_height},
  };
  return f;
}

inline double number_field(const json& j, const std::string& path) {
  if (!j.is_number()) throw Error("field '" + path + "' must be a number");
  return j.get<double>();
}

inline void require_object(const json& j, const std::string& what) {
  if (!j.is_object()) throw Error(what + " must be an object");
}

template <class T>
void read_fields(const json& j, T& out, const std::vector<Field<T>>& fields, const std::string& prefix,
                 const std::set<std::string>& extra_allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = extra_allowed.count(key) > 0;
    for (const auto& f : fields) known = known || key == f.name;
    if (!known) throw Error("unknown field '" + prefix + key + "'");
  }
  for (const auto& f : fields) {
    auto it = j.find(f.name);
    if (it == j.end()) throw Error("missing required field '" + prefix + f.name + "'");
    out.*(f.member) = number_field(*it, prefix + f.name);
  }
}

}  // namespace detail

inline json to_json(const LegParams& l) {
  json j;
  for (const auto& f : detail::leg_fields()) j[f.name] = l.*(f.member);
  j["swing_duration"] = l.swing_duration();
  return j;
}

inline json to_json(const GaitParams& g) {
  json j = json::object();
  for (const auto& f : detail::gait_fields()) j[f.name] = g.*(f.member);
  json legs = json::object();
  for (LegId id : kAllLegs) legs[std::string(to_string(id))] = to_json(g.leg(id));
  j["legs"] = std::move(legs);
  return j;
}

/// Strict inverse of to_json: every field required, unknown fields rejected,
/// invariants validated.
inline GaitParams gait_params_from_json(const json& j) {
  detail::require_object(j, "params");
  GaitParams g;
  detail::read_fields(j, g, detail::gait_fields(), "", {"legs"});
  auto legs_it = j.find("legs");
  if (legs_it == j.end()) throw Error("missing required field 'legs'");
  detail::require_object(*legs_it, "legs");
  for (const auto& [key, value] : legs_it->items())
    if (!parse_leg(key)) throw Error("unknown field 'legs." + key + "'");
  for (LegId id : kAllLegs) {
    const std::string name(to_string(id));
    auto it = legs_it->find(name);
    if (it == legs_it->end()) throw Error("missing required field 'legs." + name + "'");
    detail::require_object(*it, "legs." + name);
    LegParams& l = g.leg(id);
    const std::string prefix = "legs." + name + ".";
    detail::read_fields(*it, l, detail::leg_fields(), prefix, {"swing_duration"});
    if (auto sw = it->find("swing_duration"); sw != it->end()) {
      const double v = detail::number_field(*sw, prefix + "swing_duration");
      if (v != l.swing_duration())
        throw Error("field '" + prefix + "swing_duration' must equal 8 - impact_duration");
    }
  }
  validate(g);
  return g;
}

/// Partial update: keys present in `patch` replace the matching fields.
inline GaitParams merge_params(const GaitParams& base, const json& patch) {
  detail::require_object(patch, "params update");
  json doc = to_json(base);
  json p = patch;
  // swing_duration is derived; drop stale values so an impact_duration edit
  // alone is accepted.
  if (p.contains("legs") && p["legs"].is_object())
    for (auto& [k, leg] : p["legs"].items())
      if (leg.is_object() && leg.contains("impact_duration") && !leg.contains("swing_duration"))
        doc["legs"][k].erase("swing_duration");
  doc.merge_patch(p);
  return gait_params_from_json(doc);
}

// ---- template config --------------------------------------------------------

namespace detail {

inline const std::vector<Field<TemplateConfig>>& template_length_fields() {
  static const std::vector<Field<TemplateConfig>> f = {
      {"spine_length", &TemplateConfig::spine_length},   {"sternum_drop", &TemplateConfig::sternum_drop},
      {"neck_length", &TemplateConfig::neck_length},     {"neck_rise", &TemplateConfig::neck_rise},
      {"head_length", &TemplateConfig::head_length},     {"muzzle_length", &TemplateConfig::muzzle_length},
      {"tail_length", &TemplateConfig::tail_length},     {"shoulder_drop", &TemplateConfig::shoulder_drop},
      {"shoulder_half_width", &TemplateConfig::shoulder_half_width},
      {"front_upper", &TemplateConfig::front_upper},     {"front_lower", &TemplateConfig::front_lower},
      {"front_pastern", &TemplateConfig::front_pastern}, {"hip_drop", &TemplateConfig::hip_drop},
      {"hip_half_width", &TemplateConfig::hip_half_width}, {"hind_upper", &TemplateConfig::hind_upper},
      {"hind_middle", &TemplateConfig::hind_middle},     {"hind_lower", &TemplateConfig::hind_lower},
      {"hind_pastern", &TemplateConfig::hind_pastern},
  };
  return f;
}

inline const std::vector<std::pair<const char*, int TemplateConfig::*>>& template_count_fields() {
  static const std::vector<std::pair<const char*, int TemplateConfig::*>> f = {
      {"spine_joints", &TemplateConfig::spine_joints},
      {"neck_joints", &TemplateConfig::neck_joints},
      {"tail_joints", &TemplateConfig::tail_joints},
  };
  return f;
}

}  // namespace detail

inline json to_json(const TemplateConfig& c) {
  json j = json::object();
  for (const auto& [name, m] : detail::template_count_fields()) j[name] = c.*m;
  for (const auto& f : detail::template_length_fields()) j[f.name] = c.*(f.member);
  return j;
}

/// Fields absent from the document keep their template defaults.
inline TemplateConfig template_config_from_json(const json& j) {
  detail::require_object(j, "skeleton");
  TemplateConfig c;
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (const auto& [name, m] : detail::template_count_fields()) {
      if (key != name) continue;
      if (!value.is_number_integer()) throw Error("field 'skeleton." + key + "' must be an integer");
      c.*m = value.get<int>();
      found = true;
    }
    for (const auto& f : detail::template_length_fields()) {
      if (key != f.name) continue;
      c.*(f.member) = detail::number_field(value, "skeleton." + key);
      found = true;
    }
    if (!found) throw Error("unknown field 'skeleton." + key + "'");
  }
  build_quadruped_template(c);  // validates
  return c;
}

// ---- preset files -------------------------------------------------------------

struct PresetDocument {
  GaitPreset preset;
  std::optional<TemplateConfig> skeleton;
};

inline json to_json(const GaitPreset& p, const std::optional<TemplateConfig>& skeleton = std::nullopt) {
  json j;
  j["format_version"] = kFormatVersion;
  j["name"] = p.name;
  j["params"] = to_json(p.params);
  if (skeleton) j["skeleton"] = to_json(*skeleton);
  return j;
}

inline PresetDocument preset_document_from_json(const json& j) {
  detail::require_object(j, "preset file");
  for (const auto& [key, value] : j.items())
    if (key != "format_version" && key != "name" && key != "params" && key != "skeleton")
      throw Error("unknown field '" + key + "'");
  for (const char* req : {"format_version", "name", "params"})
    if (!j.contains(req)) throw Error(std::string("missing required field '") + req + "'");
  if (!j["format_version"].is_number_integer() || j["format_version"].get<int>() != kFormatVersion)
    throw Error("unsupported preset format_version (expected " + std::to_string(kFormatVersion) + ")");
  if (!j["name"].is_string() || j["name"].get<std::string>().empty())
    throw Error("field 'name' must be a non-empty string");
  PresetDocument doc;
  doc.preset.name = j["name"].get<std::string>();
  doc.preset.params = gait_params_from_json(j["params"]);
  if (j.contains("skeleton")) doc.skeleton = template_config_from_json(j["skeleton"]);
  return doc;
}

namespace detail {

inline json parse_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw Error("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace detail

inline void write_preset(const GaitPreset& p, const std::filesystem::path& path,
                         const std::optional<TemplateConfig>& skeleton = std::nullopt) {
  detail::write_text(path, to_json(p, skeleton).dump(2) + "\n");
}

inline PresetDocument read_preset_document(const std::filesystem::path& path) {
  try {
    return preset_document_from_json(detail::parse_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

inline GaitPreset read_preset(const std::filesystem::path& path) { return read_preset_document(path).preset; }

// ---- layer files -------------------------------------------------------------

inline json to_json(const AnimLayer& layer) {
  json tracks = json::array();
  for (const auto& t : layer.tracks) {
    json keys = json::array();
    for (const auto& k : t.keys) keys.push_back({k.frame, k.value});
    tracks.push_back({{"joint", t.joint},
                      {"channel", std::string(to_string(t.channel))},
                      {"mode", std::string(to_string(t.mode))},
                      {"weight", t.weight},
                      {"keys", keys}});
  }
  return {{"format_version", kFormatVersion}, {"enabled", layer.enabled}, {"tracks", tracks}};
}

inline AnimLayer layer_from_json(const json& j) {
  detail::require_object(j, "layer file");
  for (const auto& [key, value] : j.items())
    if (key != "format_version" && key != "enabled" && key != "tracks") throw Error("unknown field '" + key + "'");
  if (!j.contains("tracks")) throw Error("missing required field 'tracks'");
  AnimLayer layer;
  if (j.contains("enabled")) {
    if (!j["enabled"].is_boolean()) throw Error("field 'enabled' must be a boolean");
    layer.enabled = j["enabled"].get<bool>();
  }
  if (!j["tracks"].is_array()) throw Error("field 'tracks' must be an array");
  std::size_t n = 0;
  for (const auto& t : j["tracks"]) {
    const std::string p = "tracks[" + std::to_string(n++) + "].";
    detail::require_object(t, p);
    for (const auto& [key, value] : t.items())
      if (key != "joint" && key != "channel" && key != "mode" && key != "weight" && key != "keys")
        throw Error("unknown field '" + p + key + "'");
    for (const char* req : {"joint", "channel", "keys"})
      if (!t.contains(req)) throw Error("missing required field '" + p + req + "'");
    OverrideTrack track;
    track.joint = t["joint"].get<std::string>();
    auto ch = parse_channel(t["channel"].get<std::string>());
    if (!ch) throw Error("field '" + p + "channel' must be one of rotX|rotY|rotZ|transX|transY|transZ");
    track.channel = *ch;
    if (t.contains("mode")) {
      auto m = parse_blend_mode(t["mode"].get<std::string>());
      if (!m) throw Error("field '" + p + "mode' must be additive or replace");
      track.mode = *m;
    }
    if (t.contains("weight")) track.weight = detail::number_field(t["weight"], p + "weight");
    for (const auto& k : t["keys"]) {
      if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
        throw Error("field '" + p + "keys' entries must be [frame, value] pairs");
      track.keys.push_back({k[0].get<double>(), k[1].get<double>()});
    }
    if (track.keys.empty()) throw Error("field '" + p + "keys' must not be empty");
    layer.tracks.push_back(std::move(track));
  }
  validate(layer);
  return layer;
}

inline void write_layer(const AnimLayer& layer, const std::filesystem::path& path) {
  detail::write_text(path, to_json(layer).dump(2) + "\n");
}

inline AnimLayer read_layer(const std::filesystem::path& path) {
  try {
    return layer_from_json(detail::parse_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

// ---- skeleton, frames, clips for the studio -----------------------------------

inline json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline json to_json(const Skeleton& s) {
  json joints = json::array();
  for (const Joint& j : s.joints())
    joints.push_back({{"name", j.name},
                      {"parent", j.parent ? json(*j.parent) : json(nullptr)},
                      {"rest_offset", vec_json(j.rest_offset)},
                      {"translates", j.translates}});
  json legs = json::object();
  for (LegId id : kAllLegs) legs[std::string(to_string(id))] = s.leg(id).joints;
  json chains = json::object();
  for (const auto& [name, list] : s.chains()) chains[name] = list;
  return {{"joints", joints}, {"legs", legs}, {"chains", chains}};
}

/// Clip dump: per joint, arrays of BVH-named channels (rotations in degrees).
inline json clip_to_json(const FrameClip& clip) {
  if (!clip.skeleton) throw Error("clip has no skeleton");
  const Skeleton& s = *clip.skeleton;
  json joints = json::object();
  for (const Joint& j : s.joints()) {
    json ch = json::object();
    if (!j.parent || j.translates)
      for (const char* n : {"Xposition", "Yposition", "Zposition"}) ch[n] = json::array();
    for (const char* n : {"Zrotation", "Xrotation", "Yrotation"}) ch[n] = json::array();
    joints[j.name] = std::move(ch);
  }
  for (const Pose& pose : clip.frames) {
    for (const Joint& j : s.joints()) {
      json& ch = joints[j.name];
      if (!j.parent || j.translates) {
        Vec3 t = j.rest_offset;
        if (!j.parent) t += pose.root_translation;
        if (auto it = pose.translations.find(j.name); it != pose.translations.end()) t += it->second;
        ch["Xposition"].push_back(t.x());
        ch["Yposition"].push_back(t.y());
        ch["Zposition"].push_back(t.z());
      }
      const Euler e = pose.rotation(j.name);
      ch["Zrotation"].push_back(deg(e.z));
      ch["Xrotation"].push_back(deg(e.x));
      ch["Yrotation"].push_back(deg(e.y));
    }
  }
  json out = {{"fps", clip.fps}, {"frame_count", clip.frames.size()}, {"joints", joints}};
  if (!clip.contacts.empty()) {
    json contacts = json::object();
    for (LegId id : kAllLegs) {
      json a = json::array();
      for (const auto& c : clip.contacts) a.push_back(c[index(id)]);
      contacts[std::string(to_string(id))] = a;
    }
    out["contacts"] = contacts;
  }
  return out;
}

/// 64-bit FNV-1a of the canonical params document, as 16 hex digits.
inline std::string params_fingerprint(const GaitParams& g) {
  const std::string text = to_json(g).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace quadgait
