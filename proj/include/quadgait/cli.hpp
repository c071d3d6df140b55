#pragma once

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "quadgait/bvh.hpp"
#include "quadgait/clip.hpp"
#include "quadgait/gait.hpp"
#include "quadgait/http.hpp"
#include "quadgait/serialize.hpp"
#include "quadgait/service.hpp"

namespace quadgait::cli {

struct SynthOptions {
  std::string gait;
  int frames = 0;
  double fps = 24.0;
  std::string out;
  std::string layer;
  std::string format;
};

struct ServeOptions {
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string preset = "walk";
  double fps = 24.0;
};

/// Resolves --gait: a library preset name, else a preset file path.
inline PresetDocument resolve_gait(const std::string& gait) {
  if (has_preset(gait)) return {preset(gait), std::nullopt};
  if (std::filesystem::is_regular_file(gait)) return read_preset_document(gait);
  throw Error("unknown gait '" + gait + "'; available presets: " + preset_list());
}

inline std::string join_order(const std::array<LegId, 4>& order) {
  std::string s;
  for (LegId l : order) s += (s.empty() ? "" : ", ") + std::string(to_string(l));
  return s;
}

inline int cmd_synth(const SynthOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.frames < 1) throw Error("frames must be ≥ 1");
    if (!(o.fps > 0.0)) throw Error("fps must be > 0");
    std::string format = o.format;
    if (format.empty()) format = std::filesystem::path(o.out).extension() == ".json" ? "json" : "bvh";
    if (format != "bvh" && format != "json") throw Error("format must be bvh or json");

    const PresetDocument doc = resolve_gait(o.gait);
    auto skeleton = std::make_shared<const Skeleton>(build_quadruped_template(doc.skeleton.value_or(TemplateConfig{})));
    std::optional<AnimLayer> layer;
    if (!o.layer.empty()) layer = read_layer(o.layer);

    const FrameClip clip = bake(doc.preset.params, skeleton, layer, o.fps, o.frames);
    if (format == "bvh")
      bvh::write_file(clip, o.out);
    else
      detail::write_text(o.out, clip_to_json(clip).dump() + "\n");

    std::size_t unreached = 0;
    for (const auto& r : clip.reports) unreached += r.all_reached() ? 0 : 1;
    out << "gait: " << doc.preset.name << "\n"
        << "frames: " << clip.frames.size() << "\n"
        << "duration: " << std::setprecision(6) << clip.frames.size() / o.fps << " s\n"
        << "footfall order: " << join_order(footfall_order(doc.preset.params)) << "\n"
        << "wrote: " << o.out << " (" << format << ")\n";
    if (unreached) err << "warning: " << unreached << " frame(s) had unreachable foot targets\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int cmd_serve(const ServeOptions& o, std::ostream& out, std::ostream& err) {
  try {
    StudioService svc(StudioService::make_session(o.preset, o.fps));
    httplib::Server server;
    use_exclusive_port(server);
    mount_routes(server, svc);
    if (!server.bind_to_port(o.host, o.port)) {
      err << "error: cannot listen on " << o.host << ":" << o.port << " (port in use?)\n";
      return 1;
    }
    out << "serving on http://" << o.host << ":" << o.port << " (preset " << o.preset << ")\n" << std::flush;
    return server.listen_after_bind() ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"quadgait: procedural quadruped gait synthesis"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "bake a gait to a BVH or JSON clip");
  s->add_option("--gait", synth.gait, "preset name (" + preset_list() + ") or preset file")->required();
  s->add_option("--frames", synth.frames, "number of frames")->required();
  s->add_option("--fps", synth.fps, "frames per second")->capture_default_str();
  s->add_option("--out", synth.out, "output path")->required();
  s->add_option("--layer", synth.layer, "override layer file");
  s->add_option("--format", synth.format, "bvh or json (default: from --out extension)");

  ServeOptions serve;
  auto* v = app.add_subcommand("serve", "run the studio HTTP service");
  v->add_option("--port", serve.port, "TCP port")->capture_default_str();
  v->add_option("--host", serve.host, "bind address")->capture_default_str();
  v->add_option("--preset", serve.preset, "initial preset")->capture_default_str();
  v->add_option("--fps", serve.fps, "frames per second")->capture_default_str();

  std::string export_name, export_out;
  auto* p = app.add_subcommand("preset", "write a library preset to a preset file");
  p->add_option("name", export_name, "preset name")->required();
  p->add_option("--out", export_out, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  if (*s) return cmd_synth(synth, out, err);
  if (*v) return cmd_serve(serve, out, err);
  try {
    write_preset(preset(export_name), export_out, TemplateConfig{});
    out << "wrote: " << export_out << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace quadgait::cli
