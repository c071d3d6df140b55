#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quadgait/gait.hpp"
#include "quadgait/layer.hpp"
#include "quadgait/motion.hpp"
#include "quadgait/skeleton.hpp"

namespace quadgait {

/// Baked frame sequence. `contacts` holds the planted flag of each leg per
/// frame when the clip came from bake(); clips read back from BVH leave it
/// empty.
struct FrameClip {
  std::shared_ptr<const Skeleton> skeleton;
  double fps = 24.0;
  std::vector<Pose> frames;
  std::vector<std::array<bool, 4>> contacts;
  std::vector<EvalReport> reports;

  friend bool operator==(const FrameClip& a, const FrameClip& b) {
    return a.fps == b.fps && a.frames == b.frames && a.contacts == b.contacts;
  }
};

inline FrameClip bake(const GaitParams& g, std::shared_ptr<const Skeleton> skeleton,
                      const std::optional<AnimLayer>& layer, double fps, int frame_count) {
  if (frame_count < 1) throw Error("frames must be ≥ 1");
  if (!(fps > 0.0)) throw Error("fps must be > 0");
  if (!skeleton) throw Error("bake: no skeleton");
  validate(g);
  FrameClip clip;
  clip.skeleton = skeleton;
  clip.fps = fps;
  clip.frames.reserve(static_cast<std::size_t>(frame_count));
  for (int f = 0; f < frame_count; ++f) {
    try {
      FrameResult r = evaluate_frame_report(EvalContext{static_cast<double>(f), fps}, g, *skeleton);
      clip.frames.push_back(layer ? apply_layer(r.pose, *layer, f, *skeleton) : std::move(r.pose));
      std::array<bool, 4> planted{};
      for (LegId leg : kAllLegs) planted[index(leg)] = r.report.legs[index(leg)].target.planted;
      clip.contacts.push_back(planted);
      clip.reports.push_back(r.report);
    } catch (const Error& e) {
      throw Error("frame " + std::to_string(f) + ": " + e.what());
    }
  }
  return clip;
}

struct FootfallEvent {
  int frame = 0;
  LegId leg = LegId::FR;
};

/// Rising edges of the planted flags. Frame 0 has no predecessor, so events
/// start at frame 1; within a frame legs appear in FR, FL, BR, BL order.
inline std::vector<FootfallEvent> footfall_events(const FrameClip& clip) {
  std::vector<FootfallEvent> out;
  for (std::size_t f = 1; f < clip.contacts.size(); ++f)
    for (LegId leg : kAllLegs)
      if (clip.contacts[f][index(leg)] && !clip.contacts[f - 1][index(leg)])
        out.push_back({static_cast<int>(f), leg});
  return out;
}

}  // namespace quadgait
