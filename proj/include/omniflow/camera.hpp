#pragma once

#include <optional>

#include "omniflow/config.hpp"
#include "omniflow/grid.hpp"
#include "omniflow/vec.hpp"

namespace omniflow {

/// Continuous image position in pixels. Integer pixel (i, j) is the unit
/// square [i, i+1) x [j, j+1) with its sampling point at (i+0.5, j+0.5).
struct PixelCoord {
  double x = 0.0;
  double y = 0.0;
};

/// Viewing direction in camera coordinates: theta is the angle from the
/// optical axis, phi the azimuth measured from image +x towards image +y.
struct SphericalDirection {
  double theta = 0.0;
  double phi = 0.0;
};

/// Camera placement. `rotation` maps camera coordinates to world coordinates;
/// its columns are the camera axes (image x, image y, optical axis) in world
/// space. The default looks straight down from 2.5 m with image x along
/// world +x.
struct CameraPose {
  Vec3 position{0.0, 0.0, 2.5};
  Mat3 rotation = Mat3::from_cols({1, 0, 0}, {0, -1, 0}, {0, 0, -1});
};

/// Equidistant fish-eye camera covering a 180-degree hemisphere: the image
/// radius of a direction is proportional to its polar angle, r = s * theta,
/// with s chosen so theta = pi/2 lands on the rim of the image circle.
class FisheyeCamera {
 public:
  FisheyeCamera(int width, int height, double cx, double cy, double rim_radius,
                CameraPose pose = CameraPose{});

  /// 512x512, principal point (256, 256), rim radius 256, default pose.
  static FisheyeCamera default_camera();

  int width() const { return width_; }
  int height() const { return height_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double rim_radius() const { return rim_radius_; }
  const CameraPose& pose() const { return pose_; }

  /// Pixels per radian of polar angle: rim_radius / (pi/2).
  double radial_scale() const;

  /// Maps a direction to image coordinates. Throws std::domain_error for
  /// theta outside [0, pi/2].
  PixelCoord project(const SphericalDirection& dir) const;

  /// Inverse of project. Throws std::domain_error outside the image circle.
  /// The returned phi lies in [0, 2*pi).
  SphericalDirection unproject(const PixelCoord& pixel) const;

  /// Unit ray direction in camera coordinates.
  static Vec3 direction_camera(const SphericalDirection& dir);

  /// Unit direction of the viewing ray through `pixel`, in world coordinates.
  Vec3 pixel_ray_world(const PixelCoord& pixel) const;

  /// Image position of a world point; empty when the point lies behind the
  /// hemisphere (camera z < 0) or coincides with the camera position.
  std::optional<PixelCoord> project_world_point(const Vec3& point) const;

  bool inside_image_circle(const PixelCoord& pixel) const;

  /// 1 where the pixel centre lies inside the image circle, else 0.
  Grid<uint8_t> image_circle_mask() const;

  /// Reads camera overrides from a config (all keys optional): width, height,
  /// cx, cy, rim_radius, cam_position ("x y z"), cam_rotation (9 row-major
  /// camera-to-world entries).
  static FisheyeCamera from_config(const Config& cfg);
  void to_config(Config& cfg) const;

  bool operator==(const FisheyeCamera& o) const;

 private:
  int width_;
  int height_;
  double cx_;
  double cy_;
  double rim_radius_;
  CameraPose pose_;
};

}  // namespace omniflow
