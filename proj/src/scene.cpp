#include "omniflow/scene.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace omniflow {

std::string to_string(PathKind kind) {
  switch (kind) {
    case PathKind::linec: return "linec";
    case PathKind::line: return "line";
    case PathKind::spiral: return "spiral";
  }
  throw std::logic_error("unreachable path kind");
}

std::string to_string(TextureMode mode) {
  return mode == TextureMode::checker ? "checker" : "homogeneous";
}

PathKind path_kind_from_string(const std::string& name) {
  if (name == "linec") return PathKind::linec;
  if (name == "line") return PathKind::line;
  if (name == "spiral") return PathKind::spiral;
  throw std::invalid_argument("unknown path kind: " + name);
}

TextureMode texture_mode_from_string(const std::string& name) {
  if (name == "checker") return TextureMode::checker;
  if (name == "homogeneous" || name == "flat") return TextureMode::homogeneous;
  throw std::invalid_argument("unknown texture mode: " + name);
}

MotionPath::MotionPath(PathKind kind, NurbsCurve curve)
    : kind_(kind),
      curve_(std::make_shared<NurbsCurve>(std::move(curve))),
      table_(std::make_shared<ArcLengthTable>(*curve_)) {}

namespace {

NurbsCurve straight_segment(double y) {
  // 10.5 m covers 63 frame steps at 4 m/s and 24 fps exactly.
  return NurbsCurve(1, {{-2.5, y, 0.0}, {8.0, y, 0.0}}, {1.0, 1.0}, {0.0, 0.0, 1.0, 1.0});
}

NurbsCurve spiral_curve() {
  constexpr int kPoints = 33;
  const double alpha_end = 4.0 * std::numbers::pi;
  std::vector<Vec3> pts;
  pts.reserve(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    const double alpha = alpha_end * static_cast<double>(i) / (kPoints - 1);
    const double r = (2.0 / std::numbers::pi) * alpha;
    pts.push_back({r * std::cos(alpha), r * std::sin(alpha), 0.0});
  }
  return NurbsCurve::clamped(3, std::move(pts));
}

}  // namespace

MotionPath MotionPath::make(PathKind kind) {
  switch (kind) {
    case PathKind::linec: return MotionPath(kind, straight_segment(0.0));
    case PathKind::line: return MotionPath(kind, straight_segment(3.0));
    case PathKind::spiral: return MotionPath(kind, spiral_curve());
  }
  throw std::logic_error("unreachable path kind");
}

double MotionPath::total_length() const { return table_->total_length(); }

Vec3 MotionPath::position_at_arc_length(double s) const {
  return curve_->evaluate(table_->param_at_length(s));
}

void SequenceSpec::validate() const {
  if (name.empty()) throw std::invalid_argument("sequence: name must not be empty");
  if (!(speed > 0.0) || !std::isfinite(speed))
    throw std::invalid_argument("sequence: speed must be positive");
  if (!(fps > 0.0) || !std::isfinite(fps))
    throw std::invalid_argument("sequence: fps must be positive");
  if (frame_count < 2) throw std::invalid_argument("sequence: need at least two frames");
  if (!(half_extent > 0.0) || !std::isfinite(half_extent))
    throw std::invalid_argument("sequence: half_extent must be positive");
  const double needed = static_cast<double>(frame_count - 1) * speed / fps;
  if (needed > path.total_length() + 1e-6)
    throw std::invalid_argument("sequence: path too short for frame_count steps at this speed");
}

CubeState cube_state_at_frame(const SequenceSpec& spec, int frame) {
  if (frame < 0 || frame >= spec.frame_count)
    throw std::invalid_argument("frame index outside the sequence");
  const double s = static_cast<double>(frame) * spec.speed / spec.fps;
  return CubeState{spec.path.position_at_arc_length(s), spec.half_extent};
}

SequenceSpec builtin_sequence(const std::string& name) {
  std::string base = name;
  TextureMode texture = TextureMode::checker;
  constexpr std::string_view kFlat = "-flat";
  if (base.size() > kFlat.size() &&
      base.compare(base.size() - kFlat.size(), kFlat.size(), kFlat) == 0) {
    texture = TextureMode::homogeneous;
    base.resize(base.size() - kFlat.size());
  }
  const auto dash = base.rfind('-');
  if (dash == std::string::npos)
    throw std::invalid_argument("unknown sequence name: " + name);
  const std::string kind_text = base.substr(0, dash);
  const std::string speed_text = base.substr(dash + 1);
  if (speed_text != "1" && speed_text != "2" && speed_text != "4")
    throw std::invalid_argument("unknown sequence name: " + name);

  SequenceSpec spec{name,
                    MotionPath::make(path_kind_from_string(kind_text)),
                    static_cast<double>(speed_text[0] - '0')};
  spec.texture = texture;
  spec.validate();
  return spec;
}

std::vector<std::string> builtin_sequence_names() {
  std::vector<std::string> names;
  for (const char* kind : {"linec", "line", "spiral"})
    for (const char* speed : {"1", "2", "4"})
      for (const char* suffix : {"", "-flat"})
        names.push_back(std::string(kind) + "-" + speed + suffix);
  return names;
}

SequenceSpec sequence_from_config(const Config& cfg) {
  const PathKind kind = path_kind_from_string(cfg.get("path"));
  SequenceSpec spec{cfg.get_or("name", ""), MotionPath::make(kind),
                    cfg.get_double_or("speed", 1.0)};
  spec.fps = cfg.get_double_or("fps", 24.0);
  spec.frame_count = static_cast<int>(cfg.get_int_or("frames", 64));
  spec.half_extent = cfg.get_double_or("half_extent", 1.0);
  spec.texture = texture_mode_from_string(cfg.get_or("texture", "checker"));
  const long long seed = cfg.get_int_or("seed", 1);
  if (seed < 0) throw ConfigError("config key 'seed': must be non-negative");
  spec.seed = static_cast<uint64_t>(seed);
  spec.camera = FisheyeCamera::from_config(cfg);
  if (spec.name.empty()) {
    std::ostringstream n;
    n << to_string(kind) << "-" << spec.speed;
    if (spec.texture == TextureMode::homogeneous) n << "-flat";
    spec.name = n.str();
  }
  spec.validate();
  return spec;
}

Config sequence_to_config(const SequenceSpec& spec) {
  Config cfg;
  cfg.set("name", spec.name);
  cfg.set("path", to_string(spec.path.kind()));
  cfg.set_double("speed", spec.speed);
  cfg.set_double("fps", spec.fps);
  cfg.set_int("frames", spec.frame_count);
  cfg.set_double("half_extent", spec.half_extent);
  cfg.set("texture", to_string(spec.texture));
  cfg.set_int("seed", static_cast<long long>(spec.seed));
  spec.camera.to_config(cfg);
  return cfg;
}

}  // namespace omniflow
