#pragma once

// Test-only helpers: an independent forward-kinematics oracle and seeded
// random generators. Nothing here calls into the library's transform code.

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "quadgait/clip.hpp"
#include "quadgait/gait.hpp"
#include "quadgait/skeleton.hpp"

namespace qg_test {

using quadgait::Pose;
using quadgait::Skeleton;
using quadgait::Vec3;

/// Rotation built from axis-angle factors, not from quadgait::to_matrix.
inline Eigen::Matrix3d oracle_rotation(const quadgait::Euler& e) {
  return (Eigen::AngleAxisd(e.z, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(e.x, Eigen::Vector3d::UnitX()) *
          Eigen::AngleAxisd(e.y, Eigen::Vector3d::UnitY()))
      .toRotationMatrix();
}

/// World position of one joint by multiplying 4x4 homogeneous transforms
/// along its root path from scratch.
inline Vec3 oracle_position(const Skeleton& s, const Pose& pose, const std::string& joint) {
  std::vector<std::size_t> path;
  for (int i = static_cast<int>(*s.find(joint)); i >= 0; i = s.parent_index(static_cast<std::size_t>(i)))
    path.insert(path.begin(), static_cast<std::size_t>(i));
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  for (std::size_t i : path) {
    const auto& j = s.joints()[i];
    Eigen::Vector3d t = j.rest_offset;
    if (!j.parent) t += pose.root_translation;
    if (auto it = pose.translations.find(j.name); it != pose.translations.end()) t += it->second;
    Eigen::Matrix4d step = Eigen::Matrix4d::Identity();
    step.block<3, 1>(0, 3) = t;
    if (auto it = pose.rotations.find(j.name); it != pose.rotations.end())
      step.block<3, 3>(0, 0) = oracle_rotation(it->second);
    m = m * step;
  }
  return m.block<3, 1>(0, 3);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline quadgait::Euler random_euler(std::mt19937_64& rng, double range = quadgait::kPi) {
  return {uniform(rng, -range, range), uniform(rng, -range, range), uniform(rng, -range, range)};
}

inline Pose random_pose(const Skeleton& s, std::mt19937_64& rng) {
  Pose p;
  p.root_translation = Vec3(uniform(rng, -2, 2), uniform(rng, 0, 2), uniform(rng, -2, 2));
  for (const auto& j : s.joints()) {
    p.rotations[j.name] = random_euler(rng);
    if (j.translates) p.translations[j.name] = Vec3(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));
  }
  return p;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

inline quadgait::GaitParams random_params(std::mt19937_64& rng) {
  quadgait::GaitParams g;
  g.motion_frequency = uniform(rng, 0.25, 6.0);
  g.counter_gait_error = uniform(rng, 0.5, 2.0);
  g.joint_error = uniform(rng, -0.5, 0.5);
  g.spine_oscillation = uniform(rng, 0.0, 0.3);
  g.bounce = uniform(rng, 0.0, 0.1);
  for (auto& l : g.legs) {
    l.impact_phase = uniform(rng, 0.0, 8.0);
    l.impact_duration = uniform(rng, 0.5, 7.5);
    l.leg_oscillation = uniform(rng, -0.2, 0.2);
  }
  return g;
}

/// Random clip on a randomly proportioned template.
inline quadgait::FrameClip random_clip(std::mt19937_64& rng) {
  quadgait::TemplateConfig c;
  c.spine_joints = 3 + static_cast<int>(rng() % 5);
  c.neck_joints = 2 + static_cast<int>(rng() % 3);
  c.tail_joints = 3 + static_cast<int>(rng() % 5);
  c.spine_length = uniform(rng, 0.6, 1.6);
  c.front_upper = uniform(rng, 0.3, 0.7);
  c.hind_lower = uniform(rng, 0.3, 0.6);
  quadgait::FrameClip clip;
  clip.skeleton = std::make_shared<const Skeleton>(quadgait::build_quadruped_template(c));
  const double fps_choices[] = {24, 25, 30, 48, 60, 120};
  clip.fps = fps_choices[rng() % 6];
  const int frames = 1 + static_cast<int>(rng() % 30);
  for (int f = 0; f < frames; ++f) clip.frames.push_back(random_pose(*clip.skeleton, rng));
  return clip;
}

struct ClipDiff {
  bool same_structure = true;
  double max_channel = 0.0;  // radians / scene units
};

/// Compares hierarchy, offsets and every channel of two clips.
inline ClipDiff compare_clips(const quadgait::FrameClip& a, const quadgait::FrameClip& b) {
  ClipDiff d;
  const auto& ja = a.skeleton->joints();
  const auto& jb = b.skeleton->joints();
  if (ja.size() != jb.size() || a.frames.size() != b.frames.size() || a.fps != b.fps) {
    d.same_structure = false;
    return d;
  }
  // Joint order may differ (BVH stores depth-first), so match by name.
  for (const auto& j : ja) {
    const auto k = b.skeleton->find(j.name);
    if (!k) {
      d.same_structure = false;
      return d;
    }
    const auto& o = jb[*k];
    if (o.parent != j.parent || o.translates != j.translates) d.same_structure = false;
    d.max_channel = std::max(d.max_channel, (j.rest_offset - o.rest_offset).cwiseAbs().maxCoeff());
  }
  for (std::size_t f = 0; f < a.frames.size(); ++f) {
    const Pose& pa = a.frames[f];
    const Pose& pb = b.frames[f];
    d.max_channel = std::max(d.max_channel, (pa.root_translation - pb.root_translation).cwiseAbs().maxCoeff());
    for (const auto& j : ja) {
      const auto ea = pa.rotation(j.name), eb = pb.rotation(j.name);
      d.max_channel = std::max({d.max_channel, std::abs(ea.x - eb.x), std::abs(ea.y - eb.y), std::abs(ea.z - eb.z)});
      auto ta = pa.translations.find(j.name), tb = pb.translations.find(j.name);
      const Vec3 va = ta == pa.translations.end() ? Vec3::Zero() : ta->second;
      const Vec3 vb = tb == pb.translations.end() ? Vec3::Zero() : tb->second;
      d.max_channel = std::max(d.max_channel, (va - vb).cwiseAbs().maxCoeff());
    }
  }
  return d;
}

// Minimizer of the summed squared arc distance on a circle of length 8,
// located by scanning a fine grid and then refining.
inline double circular_weighted_mean(double a, double b, double t) {
  auto arc = [](double x, double y) {
    const double d = std::fmod(std::abs(x - y), 8.0);
    return std::min(d, 8.0 - d);
  };
  auto cost = [&](double c) { return (1.0 - t) * arc(c, a) * arc(c, a) + t * arc(c, b) * arc(c, b); };
  double best = 0.0, best_cost = cost(0.0);
  for (int i = 1; i < 80000; ++i) {
    const double c = i * 1e-4;
    if (double v = cost(c); v < best_cost) best = c, best_cost = v;
  }
  for (double step = 1e-5; step > 1e-13; step *= 0.1)
    for (int i = -20; i <= 20; ++i) {
      const double c = best + i * step;
      if (double v = cost(c); v < best_cost) best = c, best_cost = v;
    }
  return quadgait::wrap(best, 8.0);
}

}  // namespace qg_test
