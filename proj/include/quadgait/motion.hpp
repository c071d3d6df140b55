#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "quadgait/gait.hpp"
#include "quadgait/ik.hpp"
#include "quadgait/math.hpp"
#include "quadgait/skeleton.hpp"

namespace quadgait {

/// Evaluation time. Sub-frame tf values are allowed.
struct EvalContext {
  double tf = 0.0;
  double fps = 24.0;

  double seconds() const { return tf / fps; }
};

inline void validate(const EvalContext& ctx) {
  if (!(ctx.fps > 0.0) || !std::isfinite(ctx.fps)) throw Error("fps must be > 0");
  if (!(ctx.tf >= 0.0) || !std::isfinite(ctx.tf)) throw Error("frame time must be >= 0");
}

/// Angular position of the gait cycle, 2*pi per cycle.
inline double cycle_angle(const EvalContext& ctx, const GaitParams& g) {
  return ctx.seconds() * kTwoPi * g.motion_frequency;
}

/// Total spine bend: sin(t * 2pi * freq * counter_gait_error) * spine_oscillation.
inline double spine_swing(const EvalContext& ctx, const GaitParams& g) {
  return std::sin(ctx.seconds() * kTwoPi * g.motion_frequency * g.counter_gait_error) * g.spine_oscillation;
}

/// Bend of joint `joint_index` of a head or tail chain. `amplitude` is the
/// whole-chain amplitude, split evenly across the chain; joint_error enters
/// as a phase offset and each joint lags its parent by phase_falloff.
inline double appendage_swing(const EvalContext& ctx, const GaitParams& g, double cycles_multiplier,
                              double amplitude, int joint_index, int chain_len) {
  if (chain_len < 1 || joint_index < 0 || joint_index >= chain_len)
    throw Error("appendage_swing: joint index out of range");
  const double phase = cycle_angle(ctx, g) * cycles_multiplier + g.joint_error + joint_index * g.phase_falloff;
  return std::sin(phase) * (amplitude / chain_len);
}

/// Fore-aft sternum offset: cos(t * 2pi * freq - pi/4) * L_osc * C_error + J_error.
inline double sternum_offset(const EvalContext& ctx, const GaitParams& g, double leg_oscillation) {
  return std::cos(cycle_angle(ctx, g) - kPi / 4.0) * leg_oscillation * g.counter_gait_error + g.joint_error;
}

/// Sternum amplitude used by evaluate_frame: mean of the front legs.
inline double sternum_leg_oscillation(const GaitParams& g) {
  return 0.5 * (g.leg(LegId::FR).leg_oscillation + g.leg(LegId::FL).leg_oscillation);
}

struct RootMotion {
  double forward = 0.0;
  double vertical = 0.0;
};

/// Constant forward velocity of one stride per cycle, with two bounce peaks
/// per cycle on top of body_height.
inline RootMotion root_motion(const EvalContext& ctx, const GaitParams& g) {
  const double t = ctx.seconds();
  return {g.stride_length * g.motion_frequency * t,
          g.body_height + g.bounce * std::abs(std::sin(t * kTwoPi * g.motion_frequency * 2.0))};
}

struct FootTarget {
  LegId leg = LegId::FR;
  Vec3 world_position = Vec3::Zero();
  bool planted = false;
  LegPhaseState phase;
};

/// World position of a joint in the identity pose.
inline Vec3 rest_position(const Skeleton& s, std::string_view joint) {
  auto i = s.find(joint);
  if (!i) throw Error("unknown joint '" + std::string(joint) + "'");
  Vec3 p = Vec3::Zero();
  for (int k = static_cast<int>(*i); k >= 0; k = s.parent_index(static_cast<std::size_t>(k)))
    p += s.joints()[static_cast<std::size_t>(k)].rest_offset;
  return p;
}

/// Foot placement from cycle arithmetic alone. A stance plants the foot half
/// a stance-excursion ahead of its rest spot relative to where the root was at
/// impact; the swing carries it one stride forward along a half-sine arc.
inline FootTarget foot_target(const EvalContext& ctx, const GaitParams& g, LegId leg, const Skeleton& s) {
  const LegParams& lp = g.leg(leg);
  const CyclePosition cp = cycle_position(ctx.tf, ctx.fps, g.motion_frequency);
  FootTarget out;
  out.leg = leg;
  out.phase = leg_phase(cp.phase, lp);

  // Start of the most recent stance window, in cycles. Mirrors the wrap
  // branch inside leg_phase so the two always agree.
  const bool wrapped = out.phase.absolute_phase - lp.impact_phase < 0.0;
  const double impact_cycles = (wrapped ? cp.whole - 1.0 : cp.whole) + lp.impact_phase / kCycleEighths;

  const Vec3 rest = rest_position(s, s.leg(leg).foot());
  const double planted_z =
      g.stride_length * impact_cycles + rest.z() + g.stride_length * lp.impact_duration / (2.0 * kCycleEighths);

  if (out.phase.mode == LegMode::Stance) {
    out.planted = true;
    out.world_position = Vec3(rest.x(), 0.0, planted_z);
  } else {
    const double p = out.phase.progress;
    out.planted = false;
    out.world_position = Vec3(rest.x(), lp.step_height * std::sin(kPi * p), planted_z + g.stride_length * p);
  }
  return out;
}

struct LegReport {
  FootTarget target;
  bool reached = true;
  double residual = 0.0;
};

struct EvalReport {
  std::array<LegReport, 4> legs{};

  bool all_reached() const {
    for (const auto& l : legs)
      if (!l.reached) return false;
    return true;
  }
  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < legs.size(); ++i)
      if (!legs[i].reached)
        out.push_back("leg " + std::string(to_string(kAllLegs[i])) + " target unreachable, residual " +
                      std::to_string(legs[i].residual));
    return out;
  }
};

struct FrameResult {
  Pose pose;
  EvalReport report;
};

/// Static neck pitch that lifts the head by roughly head_high.
inline double neck_posture(const GaitParams& g, const Skeleton& s) {
  double length = 0.0;
  for (const auto& n : s.chain(kNeckChain)) length += s.joint(n).rest_offset.norm();
  return -std::atan2(g.head_high, length);
}

/// Full procedural pose for one frame. Pure: identical inputs give
/// bitwise-identical output.
inline FrameResult evaluate_frame_report(const EvalContext& ctx, const GaitParams& g, const Skeleton& s) {
  validate(ctx);
  validate(g);
  FrameResult out;
  Pose& pose = out.pose;

  const RootMotion root = root_motion(ctx, g);
  pose.root_translation = Vec3(0.0, root.vertical, root.forward);

  const auto& spine = s.chain(kSpineChain);
  const double bend = spine_swing(ctx, g) / static_cast<double>(spine.size());
  for (const auto& j : spine) pose.rotations[j] = Euler{0.0, bend, 0.0};

  pose.translations["sternum"] = Vec3(0.0, 0.0, sternum_offset(ctx, g, sternum_leg_oscillation(g)));

  const auto& neck = s.chain(kNeckChain);
  const int neck_len = static_cast<int>(neck.size());
  for (int k = 0; k < neck_len; ++k) {
    double x = appendage_swing(ctx, g, g.head_oscillation, g.head_amplitude, k, neck_len);
    if (k == 0) x += neck_posture(g, s);
    pose.rotations[neck[static_cast<std::size_t>(k)]] = Euler{x, 0.0, 0.0};
  }
  if (s.find("head")) pose.rotations["head"] = Euler{g.head_pos, 0.0, 0.0};

  const auto& tail = s.chain(kTailChain);
  const int tail_len = static_cast<int>(tail.size());
  for (int k = 0; k < tail_len; ++k)
    pose.rotations[tail[static_cast<std::size_t>(k)]] =
        Euler{appendage_swing(ctx, g, g.tail_swing, g.tail_amplitude, k, tail_len), 0.0, 0.0};

  // Leg roots depend only on the body joints posed above.
  const WorldPose body = local_to_world(s, pose);
  for (LegId leg : kAllLegs) {
    const LegChain& chain = s.leg(leg);
    const auto root_index = s.find(chain.root());
    if (!root_index) throw Error("unknown joint '" + chain.root() + "'");
    const int parent = s.parent_index(*root_index);
    const Mat3 parent_orientation =
        parent < 0 ? Mat3::Identity() : body.at(s.joints()[static_cast<std::size_t>(parent)].name).orientation;

    LegReport& rep = out.report.legs[index(leg)];
    rep.target = foot_target(ctx, g, leg, s);
    const IkSolution ik = solve_leg(s, chain, parent_orientation, body.position(chain.root()),
                                    rep.target.world_position, g.hind_coupling_angle, forward_axis());
    rep.reached = ik.reached;
    rep.residual = ik.residual;
    for (const auto& [name, e] : ik.joint_rotations) pose.rotations[name] = e;
  }
  return out;
}

inline Pose evaluate_frame(const EvalContext& ctx, const GaitParams& g, const Skeleton& s) {
  return evaluate_frame_report(ctx, g, s).pose;
}

/// Frames in one gait cycle.
inline double frames_per_cycle(double fps, const GaitParams& g) { return fps / g.motion_frequency; }

}  // namespace quadgait
