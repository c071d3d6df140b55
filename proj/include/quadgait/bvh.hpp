#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "quadgait/clip.hpp"
#include "quadgait/math.hpp"
#include "quadgait/skeleton.hpp"

namespace quadgait::bvh {

inline constexpr const char* kRootChannels = "Xposition Yposition Zposition Zrotation Xrotation Yrotation";
inline constexpr const char* kJointChannels = "Zrotation Xrotation Yrotation";

/// Number of values per frame row.
inline std::size_t channel_count(const Skeleton& s) {
  std::size_t n = 0;
  for (const Joint& j : s.joints()) n += (!j.parent || j.translates) ? 6 : 3;
  return n;
}

/// Depth-first joint order used by both the HIERARCHY and the frame rows.
inline std::vector<std::size_t> traversal_order(const Skeleton& s) {
  std::vector<std::size_t> order;
  std::vector<std::size_t> stack{s.root_index()};
  while (!stack.empty()) {
    const std::size_t j = stack.back();
    stack.pop_back();
    order.push_back(j);
    auto kids = s.children(j);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

namespace detail {

inline std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << (v == 0.0 ? 0.0 : v);
  return os.str();
}

inline void write_joint(std::ostream& os, const Skeleton& s, std::size_t i, int depth) {
  const Joint& j = s.joints()[i];
  const std::string ind(static_cast<std::size_t>(depth), '\t');
  const bool root = !j.parent;
  os << ind << (root ? "ROOT " : "JOINT ") << j.name << "\n" << ind << "{\n";
  os << ind << "\tOFFSET " << num(j.rest_offset.x()) << ' ' << num(j.rest_offset.y()) << ' '
     << num(j.rest_offset.z()) << "\n";
  if (root || j.translates)
    os << ind << "\tCHANNELS 6 " << kRootChannels << "\n";
  else
    os << ind << "\tCHANNELS 3 " << kJointChannels << "\n";
  const auto kids = s.children(i);
  for (std::size_t c : kids) write_joint(os, s, c, depth + 1);
  if (kids.empty()) os << ind << "\tEnd Site\n" << ind << "\t{\n" << ind << "\t\tOFFSET 0 0 0\n" << ind << "\t}\n";
  os << ind << "}\n";
}

}  // namespace detail

/// Serializes a clip. Position channels carry the joint's full local
/// translation (rest offset plus pose delta; root: plus root_translation).
/// Rotations are written in degrees.
inline void write(std::ostream& os, const FrameClip& clip) {
  if (!clip.skeleton) throw Error("bvh: clip has no skeleton");
  if (clip.frames.empty()) throw Error("bvh: clip has no frames");
  if (!(clip.fps > 0.0)) throw Error("bvh: fps must be > 0");
  const Skeleton& s = *clip.skeleton;

  os << "HIERARCHY\n";
  detail::write_joint(os, s, s.root_index(), 0);
  os << "MOTION\n";
  os << "Frames: " << clip.frames.size() << "\n";
  {
    std::ostringstream ft;
    ft << 1.0 / clip.fps;  // default stream precision: 1/24 -> 0.0416667
    os << "Frame Time: " << ft.str() << "\n";
  }

  const auto order = traversal_order(s);
  for (const Pose& pose : clip.frames) {
    bool first = true;
    auto put = [&](double v) {
      if (!first) os << ' ';
      os << detail::num(v);
      first = false;
    };
    for (std::size_t i : order) {
      const Joint& j = s.joints()[i];
      if (!j.parent || j.translates) {
        Vec3 t = j.rest_offset;
        if (!j.parent) t += pose.root_translation;
        if (auto it = pose.translations.find(j.name); it != pose.translations.end()) t += it->second;
        put(t.x());
        put(t.y());
        put(t.z());
      }
      const Euler e = pose.rotation(j.name);
      put(deg(e.z));
      put(deg(e.x));
      put(deg(e.y));
    }
    os << "\n";
  }
}

inline void write_file(const FrameClip& clip, const std::filesystem::path& path) {
  std::ostringstream buf;
  write(buf, clip);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("bvh: cannot open '" + path.string() + "' for writing");
  f << buf.str();
  if (!f) throw Error("bvh: write to '" + path.string() + "' failed");
}

namespace detail {

struct Token {
  std::string text;
  int line = 0;
};

class Parser {
 public:
  explicit Parser(std::istream& is) {
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
      ++n;
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens_.push_back({tok, n});
    }
    last_line_ = n;
  }

  FrameClip parse() {
    expect("HIERARCHY");
    expect("ROOT");
    parse_joint(std::nullopt);
    expect("MOTION");
    expect("Frames:");
    const Token& count_tok = next("frame count");
    const long frames = to_long(count_tok);
    expect("Frame");
    expect("Time:");
    const Token& ft_tok = next("frame time");
    const double frame_time = to_double(ft_tok);
    if (!(frame_time > 0.0)) fail(ft_tok.line, "frame time must be > 0");

    FrameClip clip;
    clip.fps = snap_fps(1.0 / frame_time);
    const std::size_t arity = channel_total_;

    int row_line = ft_tok.line;
    while (pos_ < tokens_.size()) {
      row_line = tokens_[pos_].line;
      std::vector<double> values;
      while (pos_ < tokens_.size() && tokens_[pos_].line == row_line) values.push_back(to_double(tokens_[pos_++]));
      if (values.size() != arity)
        fail(row_line, "frame row has " + std::to_string(values.size()) + " values, expected " + std::to_string(arity));
      clip.frames.push_back(decode_row(values));
    }
    if (static_cast<long>(clip.frames.size()) != frames)
      fail(last_line_, "file declares " + std::to_string(frames) + " frames but contains " +
                           std::to_string(clip.frames.size()));

    std::array<LegChain, 4> legs{};
    for (LegId leg : kAllLegs) legs[index(leg)].leg = leg;
    clip.skeleton = std::make_shared<const Skeleton>(joints_, legs);
    return clip;
  }

 private:
  struct Layout {
    std::string name;
    bool root = false;
    bool positions = false;
    Vec3 offset;
  };

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw Error("bvh line " + std::to_string(line) + ": " + msg);
  }

  const Token& next(const std::string& what) {
    if (pos_ >= tokens_.size()) fail(last_line_, "unexpected end of file, expected " + what);
    return tokens_[pos_++];
  }

  const Token& peek_or_fail(const std::string& what) {
    if (pos_ >= tokens_.size()) fail(last_line_, "unexpected end of file, expected " + what);
    return tokens_[pos_];
  }

  void expect(const std::string& kw) {
    const Token& t = next("keyword '" + kw + "'");
    if (t.text != kw) fail(t.line, "expected keyword '" + kw + "', found '" + t.text + "'");
  }

  double to_double(const Token& t) const {
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) fail(t.line, "expected a number, found '" + t.text + "'");
    return v;
  }

  long to_long(const Token& t) const {
    long v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size() || v < 0)
      fail(t.line, "expected a frame count, found '" + t.text + "'");
    return v;
  }

  static double snap_fps(double fps) {
    const double r = std::round(fps);
    return (r > 0.0 && std::abs(fps - r) <= 1e-4 * r) ? r : fps;
  }

  Vec3 read_offset() {
    expect("OFFSET");
    Vec3 v;
    for (int k = 0; k < 3; ++k) v[k] = to_double(next("offset value"));
    return v;
  }

  void parse_joint(const std::optional<std::string>& parent) {
    const Token& name = next("joint name");
    expect("{");
    Layout lay;
    lay.name = name.text;
    lay.root = !parent;
    lay.offset = read_offset();

    expect("CHANNELS");
    const Token& count_tok = next("channel count");
    const long count = to_long(count_tok);
    std::string layout;
    for (long k = 0; k < count; ++k) layout += (k ? " " : "") + next("channel name").text;
    if (count == 6 && layout == kRootChannels) {
      lay.positions = true;
    } else if (count == 3 && layout == kJointChannels && parent) {
      lay.positions = false;
    } else {
      fail(count_tok.line, "unsupported channel layout for joint '" + name.text + "': " + std::to_string(count) +
                               " [" + layout + "]");
    }
    channel_total_ += lay.positions ? 6 : 3;

    Joint j;
    j.name = lay.name;
    j.parent = parent;
    j.rest_offset = lay.offset;
    j.translates = parent.has_value() && lay.positions;
    joints_.push_back(j);
    layout_.push_back(lay);

    while (true) {
      const Token& t = peek_or_fail("'}'");
      if (t.text == "}") {
        ++pos_;
        return;
      }
      if (t.text == "JOINT") {
        ++pos_;
        parse_joint(lay.name);
      } else if (t.text == "End") {
        ++pos_;
        expect("Site");
        expect("{");
        read_offset();
        expect("}");
      } else {
        fail(t.line, "expected JOINT, End Site or '}', found '" + t.text + "'");
      }
    }
  }

  Pose decode_row(const std::vector<double>& v) const {
    Pose pose;
    std::size_t k = 0;
    for (const Layout& lay : layout_) {
      if (lay.positions) {
        const Vec3 t(v[k], v[k + 1], v[k + 2]);
        k += 3;
        if (lay.root)
          pose.root_translation = t - lay.offset;
        else
          pose.translations[lay.name] = t - lay.offset;
      }
      pose.rotations[lay.name] = Euler{rad(v[k + 1]), rad(v[k + 2]), rad(v[k])};
      k += 3;
    }
    return pose;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int last_line_ = 0;
  std::size_t channel_total_ = 0;
  std::vector<Joint> joints_;
  std::vector<Layout> layout_;
};

}  // namespace detail

/// Parses the subset emitted by write(). The returned skeleton carries the
/// hierarchy and offsets only (no leg or chain descriptors).
inline FrameClip read(std::istream& is) { return detail::Parser(is).parse(); }

inline FrameClip read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("bvh: cannot open '" + path.string() + "'");
  return read(f);
}

}  // namespace quadgait::bvh
