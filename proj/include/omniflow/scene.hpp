#pragma once

#include <memory>
#include <string>
#include <vector>

#include "omniflow/camera.hpp"
#include "omniflow/config.hpp"
#include "omniflow/nurbs.hpp"
#include "omniflow/vec.hpp"

namespace omniflow {

enum class PathKind { linec, line, spiral };
enum class TextureMode { checker, homogeneous };

std::string to_string(PathKind kind);
std::string to_string(TextureMode mode);
PathKind path_kind_from_string(const std::string& name);
TextureMode texture_mode_from_string(const std::string& name);

/// Trajectory of the cube centre, traversed at constant speed by arc length.
/// All built-in paths lie in the z = 0 plane.
class MotionPath {
 public:
  MotionPath(PathKind kind, NurbsCurve curve);

  /// linec: straight segment (-2.5, 0, 0) -> (8, 0, 0); passes through the
  ///        point directly below the camera.
  /// line:  the same segment offset to y = +3.
  /// spiral: cubic fit of an Archimedean spiral r = (2/pi) * alpha,
  ///        alpha in [0, 4*pi], from (0, 0, 0) out to (8, 0, 0).
  static MotionPath make(PathKind kind);

  PathKind kind() const { return kind_; }
  const NurbsCurve& curve() const { return *curve_; }
  double total_length() const;
  Vec3 position_at_arc_length(double s) const;

 private:
  PathKind kind_;
  std::shared_ptr<const NurbsCurve> curve_;
  std::shared_ptr<const ArcLengthTable> table_;
};

/// Axis-aligned cube at a frame: centre, fixed half extent, no rotation.
struct CubeState {
  Vec3 center;
  double half_extent = 1.0;
};

/// Full description of one synthetic sequence.
struct SequenceSpec {
  std::string name;
  MotionPath path;
  double speed = 1.0;  // metres per second along the path
  double fps = 24.0;
  int frame_count = 64;
  double half_extent = 1.0;
  TextureMode texture = TextureMode::checker;
  uint64_t seed = 1;
  FisheyeCamera camera = FisheyeCamera::default_camera();

  /// Throws std::invalid_argument when parameters are out of range or the
  /// path is too short for frame_count steps at this speed.
  void validate() const;
};

/// Cube centre after frame * speed / fps metres of arc. `frame` must lie in
/// [0, frame_count).
CubeState cube_state_at_frame(const SequenceSpec& spec, int frame);

/// Built-in sequence from a name like "linec-1", "spiral-4" or
/// "line-2-flat" (checker texture by default, "-flat" for homogeneous).
SequenceSpec builtin_sequence(const std::string& name);

/// All 18 built-in names: {linec,line,spiral} x {1,2,4} x {checker,flat}.
std::vector<std::string> builtin_sequence_names();

SequenceSpec sequence_from_config(const Config& cfg);
Config sequence_to_config(const SequenceSpec& spec);

}  // namespace omniflow
