#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "quadgait/math.hpp"
#include "quadgait/skeleton.hpp"

namespace quadgait {

/// Phase units: one gait cycle is eight "eighths".
inline constexpr double kCycleEighths = 8.0;

struct LegParams {
  double impact_phase = 0.0;     // eighths in [0, 8): foot strike
  double impact_duration = 4.0;  // eighths in (0, 8): ground contact
  double leg_oscillation = 0.0;  // scene units, sternum surge amplitude
  double leg_cycle = 1.0;        // leg cycles per second
  double step_height = 0.1;      // scene units, swing apex

  double swing_duration() const { return kCycleEighths - impact_duration; }
  double duty_factor() const { return impact_duration / kCycleEighths; }

  friend bool operator==(const LegParams&, const LegParams&) = default;
};

struct GaitParams {
  double motion_frequency = 1.0;   // cycles per second ("Speed")
  double counter_gait_error = 1.0;
  double joint_error = 0.0;
  double spine_oscillation = 0.0;  // radians, total spine bend amplitude
  double body_height = 1.2;        // root height ("High")
  double bounce = 0.0;
  double head_high = 0.0;
  double head_pos = 0.0;           // radians
  double head_oscillation = 1.0;   // head cycles per gait cycle
  double head_amplitude = 0.0;     // radians over the whole neck chain
  double tail_swing = 1.0;         // tail cycles per gait cycle
  double tail_amplitude = 0.0;     // radians over the whole tail chain
  double phase_falloff = 0.0;      // radians of phase lag per chain joint
  double stride_length = 1.0;      // forward travel per cycle
  double hind_coupling_angle = 2.6;  // fixed interior calcaneus angle, radians
  std::array<LegParams, 4> legs{};   // indexed by LegId

  LegParams& leg(LegId id) { return legs[index(id)]; }
  const LegParams& leg(LegId id) const { return legs[index(id)]; }

  friend bool operator==(const GaitParams&, const GaitParams&) = default;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error("invalid gait parameters: " + what);
}

}  // namespace detail

/// Throws Error naming the first violated invariant.
inline void validate(const GaitParams& g) {
  using detail::require;
  const std::pair<double, const char*> finite[] = {
      {g.motion_frequency, "motion_frequency"}, {g.counter_gait_error, "counter_gait_error"},
      {g.joint_error, "joint_error"},           {g.spine_oscillation, "spine_oscillation"},
      {g.body_height, "body_height"},           {g.bounce, "bounce"},
      {g.head_high, "head_high"},               {g.head_pos, "head_pos"},
      {g.head_oscillation, "head_oscillation"}, {g.head_amplitude, "head_amplitude"},
      {g.tail_swing, "tail_swing"},             {g.tail_amplitude, "tail_amplitude"},
      {g.phase_falloff, "phase_falloff"},       {g.stride_length, "stride_length"},
      {g.hind_coupling_angle, "hind_coupling_angle"}};
  for (const auto& [v, name] : finite) require(std::isfinite(v), std::string(name) + " must be finite");
  require(g.motion_frequency > 0.0, "motion_frequency must be > 0");
  require(g.counter_gait_error > 0.0, "counter_gait_error must be > 0");
  require(g.spine_oscillation >= 0.0, "spine_oscillation must be >= 0");
  require(g.bounce >= 0.0, "bounce must be >= 0");
  require(g.stride_length >= 0.0, "stride_length must be >= 0");
  require(g.hind_coupling_angle > 0.0 && g.hind_coupling_angle <= kPi,
          "hind_coupling_angle must lie in (0, pi]");
  for (LegId id : kAllLegs) {
    const LegParams& l = g.leg(id);
    const std::string p = "legs." + std::string(to_string(id)) + ".";
    for (double v : {l.impact_phase, l.impact_duration, l.leg_oscillation, l.leg_cycle, l.step_height})
      require(std::isfinite(v), p + "fields must be finite");
    require(l.impact_phase >= 0.0 && l.impact_phase < kCycleEighths, p + "impact_phase must lie in [0, 8)");
    require(l.impact_duration > 0.0 && l.impact_duration < kCycleEighths,
            p + "impact_duration must lie in (0, 8)");
    require(l.step_height >= 0.0, p + "step_height must be >= 0");
  }
}

/// Continuous cycle count at a frame, split into whole cycles and phase.
struct CyclePosition {
  double cycles = 0.0;
  double whole = 0.0;  // floor(cycles)
  double phase = 0.0;  // cycles - whole, in [0, 1)
};

inline CyclePosition cycle_position(double tf, double fps, double motion_frequency) {
  if (!(fps > 0.0)) throw Error("fps must be > 0");
  if (!(motion_frequency > 0.0)) throw Error("motion_frequency must be > 0");
  if (!(tf >= 0.0)) throw Error("frame time must be >= 0");
  CyclePosition c;
  c.cycles = tf / fps * motion_frequency;
  c.whole = std::floor(c.cycles);
  c.phase = c.cycles - c.whole;
  return c;
}

/// Normalized cycle time: 0 at the start of a cycle, wrapping at 1.
inline double cyclic_time(double tf, double fps, double motion_frequency) {
  return cycle_position(tf, fps, motion_frequency).phase;
}

enum class LegMode { Stance, Swing };

struct LegPhaseState {
  LegMode mode = LegMode::Stance;
  double progress = 0.0;        // [0, 1) through the current stance or swing
  double absolute_phase = 0.0;  // eighths in [0, 8)
  // Eighths elapsed since the start of the most recent stance window, [0, 8).
  double since_impact = 0.0;
};

namespace detail {

inline double below_one(double v) { return v < 1.0 ? v : std::nextafter(1.0, 0.0); }

}  // namespace detail

/// Classifies a leg at a global cycle phase. The stance window is
/// [impact_phase, impact_phase + impact_duration) mod 8; swing fills the rest.
inline LegPhaseState leg_phase(double global_phase, const LegParams& leg) {
  if (!(global_phase >= 0.0 && global_phase < 1.0)) throw Error("global phase must lie in [0, 1)");
  LegPhaseState s;
  s.absolute_phase = global_phase * kCycleEighths;
  double rel = s.absolute_phase - leg.impact_phase;
  if (rel < 0.0) rel += kCycleEighths;
  s.since_impact = rel;
  if (rel < leg.impact_duration) {
    s.mode = LegMode::Stance;
    s.progress = detail::below_one(rel / leg.impact_duration);
  } else {
    s.mode = LegMode::Swing;
    s.progress = detail::below_one((rel - leg.impact_duration) / leg.swing_duration());
  }
  return s;
}

/// Legs sorted by impact phase; ties keep FR, FL, BR, BL order.
inline std::array<LegId, 4> footfall_order(const GaitParams& g) {
  std::array<LegId, 4> order = kAllLegs;
  std::stable_sort(order.begin(), order.end(), [&](LegId a, LegId b) {
    return g.leg(a).impact_phase < g.leg(b).impact_phase;
  });
  return order;
}

struct GaitPreset {
  std::string name;
  GaitParams params;

  friend bool operator==(const GaitPreset&, const GaitPreset&) = default;
};

namespace detail {

inline GaitParams with_legs(GaitParams g, std::array<double, 4> phases, double duration,
                            double leg_oscillation, double step_height) {
  for (LegId id : kAllLegs) {
    LegParams& l = g.leg(id);
    l.impact_phase = phases[index(id)];
    l.impact_duration = duration;
    l.leg_oscillation = leg_oscillation;
    l.leg_cycle = g.motion_frequency;
    l.step_height = step_height;
  }
  return g;
}

inline std::vector<GaitPreset> build_library() {
  std::vector<GaitPreset> lib;

  // Lateral-sequence walk: BL, FL, BR, FR two eighths apart, duty 5/8.
  GaitParams walk;
  walk.motion_frequency = 1.0;
  walk.spine_oscillation = 0.06;
  walk.body_height = 1.3;
  walk.bounce = 0.02;
  walk.head_high = 0.05;
  walk.head_oscillation = 2.0;
  walk.head_amplitude = 0.08;
  walk.tail_swing = 1.0;
  walk.tail_amplitude = 0.15;
  walk.phase_falloff = 0.3;
  walk.stride_length = 1.0;
  lib.push_back({"walk", with_legs(walk, {6.0, 2.0, 4.0, 0.0}, 5.0, 0.02, 0.12)});

  GaitParams amble = walk;
  amble.motion_frequency = 4.0;
  amble.spine_oscillation = 0.04;
  amble.bounce = 0.02;
  amble.head_oscillation = 1.0;
  amble.head_amplitude = 0.06;
  amble.stride_length = 0.5;
  lib.push_back({"amble", with_legs(amble, {1.0, 5.0, 7.0, 3.0}, 3.0, 0.02, 0.10)});

  // Diagonal pairs FR+BL and FL+BR half a cycle apart.
  GaitParams trot = walk;
  trot.motion_frequency = 2.0;
  trot.spine_oscillation = 0.05;
  trot.bounce = 0.04;
  trot.head_oscillation = 2.0;
  trot.head_amplitude = 0.05;
  trot.stride_length = 1.2;
  lib.push_back({"trot", with_legs(trot, {0.0, 4.0, 4.0, 0.0}, 3.5, 0.03, 0.15)});

  // Transverse gallop BL, BR, FL, FR with a one-eighth suspension.
  GaitParams gallop = walk;
  gallop.motion_frequency = 2.0;
  gallop.spine_oscillation = 0.15;
  gallop.body_height = 1.22;
  gallop.bounce = 0.06;
  gallop.head_oscillation = 1.0;
  gallop.head_amplitude = 0.12;
  gallop.stride_length = 2.0;
  lib.push_back({"gallop", with_legs(gallop, {4.0, 3.0, 1.0, 0.0}, 3.0, 0.04, 0.20)});

  return lib;
}

}  // namespace detail

inline const std::vector<GaitPreset>& preset_library() {
  static const std::vector<GaitPreset> lib = detail::build_library();
  return lib;
}

inline std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : preset_library()) out.push_back(p.name);
  return out;
}

inline std::string preset_list() {
  std::string out;
  for (const auto& n : preset_names()) out += (out.empty() ? "" : ", ") + n;
  return out;
}

inline bool has_preset(std::string_view name) {
  const auto& lib = preset_library();
  return std::any_of(lib.begin(), lib.end(), [&](const GaitPreset& p) { return p.name == name; });
}

/// Returns a copy of a library preset.
inline GaitPreset preset(std::string_view name) {
  for (const auto& p : preset_library())
    if (p.name == name) return p;
  throw Error("unknown gait '" + std::string(name) + "'; available presets: " + preset_list());
}

/// Signed shortest arc from a to b on the 8-eighth circle, in (-4, 4].
inline double circular_delta(double a, double b) {
  const double d = b - a;
  return d - kCycleEighths * std::ceil((d - kCycleEighths / 2.0) / kCycleEighths);
}

inline double blend_phase(double a, double b, double t) {
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  return wrap(a + t * circular_delta(a, b), kCycleEighths);
}

/// Linear blend of every scalar; impact phases travel the shorter arc of the
/// cycle circle (ties go forward).
inline GaitParams blend_params(const GaitParams& a, const GaitParams& b, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error("blend factor must lie in [0, 1]");
  auto mix = [t](double x, double y) { return std::lerp(x, y, t); };
  GaitParams out;
  out.motion_frequency = mix(a.motion_frequency, b.motion_frequency);
  out.counter_gait_error = mix(a.counter_gait_error, b.counter_gait_error);
  out.joint_error = mix(a.joint_error, b.joint_error);
  out.spine_oscillation = mix(a.spine_oscillation, b.spine_oscillation);
  out.body_height = mix(a.body_height, b.body_height);
  out.bounce = mix(a.bounce, b.bounce);
  out.head_high = mix(a.head_high, b.head_high);
  out.head_pos = mix(a.head_pos, b.head_pos);
  out.head_oscillation = mix(a.head_oscillation, b.head_oscillation);
  out.head_amplitude = mix(a.head_amplitude, b.head_amplitude);
  out.tail_swing = mix(a.tail_swing, b.tail_swing);
  out.tail_amplitude = mix(a.tail_amplitude, b.tail_amplitude);
  out.phase_falloff = mix(a.phase_falloff, b.phase_falloff);
  out.stride_length = mix(a.stride_length, b.stride_length);
  out.hind_coupling_angle = mix(a.hind_coupling_angle, b.hind_coupling_angle);
  for (LegId id : kAllLegs) {
    const LegParams& la = a.leg(id);
    const LegParams& lb = b.leg(id);
    LegParams& lo = out.leg(id);
    lo.impact_phase = blend_phase(la.impact_phase, lb.impact_phase, t);
    lo.impact_duration = std::clamp(mix(la.impact_duration, lb.impact_duration),
                                    std::nextafter(0.0, 1.0), std::nextafter(kCycleEighths, 0.0));
    lo.leg_oscillation = mix(la.leg_oscillation, lb.leg_oscillation);
    lo.leg_cycle = mix(la.leg_cycle, lb.leg_cycle);
    lo.step_height = mix(la.step_height, lb.step_height);
  }
  return out;
}

}  // namespace quadgait
