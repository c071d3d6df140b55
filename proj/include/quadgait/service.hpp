#pragma once

#include <algorithm>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>

#include "quadgait/clip.hpp"
#include "quadgait/gait.hpp"
#include "quadgait/layer.hpp"
#include "quadgait/motion.hpp"
#include "quadgait/serialize.hpp"
#include "quadgait/skeleton.hpp"

namespace quadgait {

/// Error carrying an HTTP status for the service layer.
class ServiceError : public Error {
 public:
  ServiceError(int status, const std::string& msg) : Error(msg), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct Transition {
  GaitParams from;
  GaitParams to;
  std::string target;
  double start_frame = 0.0;
  double duration_frames = 1.0;

  double progress(double playhead) const {
    return std::clamp((playhead - start_frame) / duration_frames, 0.0, 1.0);
  }
};

struct Session {
  GaitParams params;
  std::string preset_name;
  std::shared_ptr<const Skeleton> skeleton;
  AnimLayer layer;
  double playhead = 0.0;
  double fps = 24.0;
  std::optional<Transition> transition;

  /// Params in effect at a frame: the transition blend while one is
  /// installed, otherwise the current params.
  GaitParams effective_params(double at) const {
    if (!transition) return params;
    return blend_params(transition->from, transition->to, transition->progress(at));
  }
};

/// The live engine session behind the HTTP API. Mutations are serialized
/// under an exclusive lock; every read works on a copy of the Session taken
/// under a shared lock, so a reader never sees a half-applied update.
class StudioService {
 public:
  explicit StudioService(Session session) : session_(std::move(session)) {
    if (!session_.skeleton) throw Error("service: session has no skeleton");
  }

  static Session make_session(const std::string& preset_name, double fps = 24.0,
                              const TemplateConfig& config = {}) {
    Session s;
    const GaitPreset p = preset(preset_name);
    s.params = p.params;
    s.preset_name = p.name;
    s.skeleton = std::make_shared<const Skeleton>(build_quadruped_template(config));
    s.fps = fps;
    return s;
  }

  Session snapshot() const {
    std::shared_lock lock(mutex_);
    return session_;
  }

  json state() const {
    const Session s = snapshot();
    const GaitParams eff = s.effective_params(s.playhead);
    json out = {{"preset", s.preset_name},
                {"presets", preset_names()},
                {"playhead", s.playhead},
                {"fps", s.fps},
                {"params", to_json(eff)},
                {"fingerprint", params_fingerprint(eff)},
                {"layer_enabled", s.layer.enabled},
                {"layer_tracks", s.layer.tracks.size()}};
    if (s.transition)
      out["transition"] = {{"target", s.transition->target},
                           {"start_frame", s.transition->start_frame},
                           {"duration_frames", s.transition->duration_frames},
                           {"progress", s.transition->progress(s.playhead)}};
    else
      out["transition"] = nullptr;
    return out;
  }

  /// Pose at frame t under the params in effect at t. Records t as the
  /// playhead; the body depends only on the session snapshot and t.
  json frame(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ServiceError(400, "t must be a finite frame time >= 0");
    const Session s = snapshot();
    json body = frame_body(s, t);
    {
      std::unique_lock lock(mutex_);
      session_.playhead = t;
    }
    return body;
  }

  static json frame_body(const Session& s, double t) {
    const GaitParams eff = s.effective_params(t);
    FrameResult r = evaluate_frame_report(EvalContext{t, s.fps}, eff, *s.skeleton);
    const Pose pose = apply_layer(r.pose, s.layer, t, *s.skeleton);
    const WorldPose world = local_to_world(*s.skeleton, pose);

    json joints = json::object();
    for (const Joint& j : s.skeleton->joints()) {
      const JointTransform& x = world.at(j.name);
      const Eigen::Quaterniond q(x.orientation);
      const Euler e = pose.rotation(j.name);
      joints[j.name] = {{"position", vec_json(x.position)},
                        {"orientation", json::array({q.w(), q.x(), q.y(), q.z()})},
                        {"rotation", json::array({e.x, e.y, e.z})}};
    }
    json contacts = json::object();
    for (LegId id : kAllLegs) contacts[std::string(to_string(id))] = r.report.legs[index(id)].target.planted;
    return {{"t", t},
            {"fps", s.fps},
            {"fingerprint", params_fingerprint(eff)},
            {"params", to_json(eff)},
            {"root_translation", vec_json(pose.root_translation)},
            {"joints", joints},
            {"contacts", contacts},
            {"warnings", r.report.warnings()}};
  }

  json clip(int frames) const {
    if (frames < 1) throw ServiceError(400, "frames must be ≥ 1");
    const Session s = snapshot();
    const GaitParams eff = s.effective_params(s.playhead);
    const FrameClip c = bake(eff, s.skeleton, s.layer, s.fps, frames);
    json out = clip_to_json(c);
    out["fingerprint"] = params_fingerprint(eff);
    return out;
  }

  json skeleton() const { return to_json(*snapshot().skeleton); }

  /// Partial params update. An active transition is frozen at the playhead
  /// first so the edit applies to what the animator currently sees.
  json post_params(const json& patch) {
    {
      std::unique_lock lock(mutex_);
      GaitParams base = session_.effective_params(session_.playhead);
      GaitParams next;
      try {
        next = merge_params(base, patch);
      } catch (const ServiceError&) {
        throw;
      } catch (const std::exception& e) {
        throw ServiceError(400, e.what());
      }
      session_.params = next;
      session_.transition.reset();
    }
    return state();
  }

  json post_preset(const std::string& name) {
    if (!has_preset(name))
      throw ServiceError(404, "unknown preset '" + name + "'; available presets: " + preset_list());
    {
      std::unique_lock lock(mutex_);
      session_.params = preset(name).params;
      session_.preset_name = name;
      session_.transition.reset();
    }
    return state();
  }

  json post_transition(const json& body) {
    if (!body.is_object() || !body.contains("name") || !body["name"].is_string())
      throw ServiceError(400, "transition body needs a string field 'name'");
    const std::string name = body["name"].get<std::string>();
    double duration = 24.0;
    if (body.contains("duration")) {
      if (!body["duration"].is_number()) throw ServiceError(400, "field 'duration' must be a number");
      duration = body["duration"].get<double>();
    }
    if (!has_preset(name))
      throw ServiceError(404, "unknown preset '" + name + "'; available presets: " + preset_list());
    if (!(duration >= 1.0)) throw ServiceError(400, "duration must be ≥ 1 frame");
    {
      std::unique_lock lock(mutex_);
      Transition tr;
      tr.from = session_.effective_params(session_.playhead);
      tr.to = preset(name).params;
      tr.target = name;
      tr.start_frame = session_.playhead;
      tr.duration_frames = duration;
      session_.params = tr.to;
      session_.preset_name = name;
      session_.transition = std::move(tr);
    }
    return state();
  }

  void set_layer(AnimLayer layer) {
    for (const auto& t : layer.tracks)
      if (!session_.skeleton->find(t.joint)) throw Error("layer track references unknown joint '" + t.joint + "'");
    validate(layer);
    std::unique_lock lock(mutex_);
    session_.layer = std::move(layer);
  }

 private:
  mutable std::shared_mutex mutex_;
  Session session_;
};

}  // namespace quadgait
