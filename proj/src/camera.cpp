#include "omniflow/camera.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace omniflow {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

FisheyeCamera::FisheyeCamera(int width, int height, double cx, double cy, double rim_radius,
                             CameraPose pose)
    : width_(width), height_(height), cx_(cx), cy_(cy), rim_radius_(rim_radius), pose_(pose) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("camera: image dimensions must be positive");
  if (!(rim_radius > 0.0) || !std::isfinite(rim_radius))
    throw std::invalid_argument("camera: rim_radius must be positive");
  if (!std::isfinite(cx) || !std::isfinite(cy))
    throw std::invalid_argument("camera: principal point must be finite");
}

FisheyeCamera FisheyeCamera::default_camera() {
  return FisheyeCamera(512, 512, 256.0, 256.0, 256.0);
}

double FisheyeCamera::radial_scale() const { return rim_radius_ / kHalfPi; }

PixelCoord FisheyeCamera::project(const SphericalDirection& dir) const {
  if (!(dir.theta >= 0.0 && dir.theta <= kHalfPi))
    throw std::domain_error("project: theta outside [0, pi/2]");
  const double r = radial_scale() * dir.theta;
  return {cx_ + r * std::cos(dir.phi), cy_ + r * std::sin(dir.phi)};
}

SphericalDirection FisheyeCamera::unproject(const PixelCoord& pixel) const {
  const double dx = pixel.x - cx_;
  const double dy = pixel.y - cy_;
  const double r = std::hypot(dx, dy);
  if (r > rim_radius_) throw std::domain_error("unproject: pixel outside the image circle");
  const double theta = r / radial_scale();
  double phi = std::atan2(dy, dx);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi = 0.0;
  return {theta, phi};
}

Vec3 FisheyeCamera::direction_camera(const SphericalDirection& dir) {
  const double st = std::sin(dir.theta);
  return {st * std::cos(dir.phi), st * std::sin(dir.phi), std::cos(dir.theta)};
}

Vec3 FisheyeCamera::pixel_ray_world(const PixelCoord& pixel) const {
  return pose_.rotation * direction_camera(unproject(pixel));
}

std::optional<PixelCoord> FisheyeCamera::project_world_point(const Vec3& point) const {
  const Vec3 offset = point - pose_.position;
  const Vec3 c = pose_.rotation.transpose() * offset;
  const double rho = std::hypot(c.x, c.y);
  if (rho == 0.0 && c.z == 0.0) return std::nullopt;  // point at the camera centre
  if (c.z < 0.0) return std::nullopt;                 // behind the hemisphere
  const double theta = std::atan2(rho, c.z);
  const double phi = std::atan2(c.y, c.x);
  const double r = radial_scale() * theta;
  return PixelCoord{cx_ + r * std::cos(phi), cy_ + r * std::sin(phi)};
}

bool FisheyeCamera::inside_image_circle(const PixelCoord& pixel) const {
  const double dx = pixel.x - cx_;
  const double dy = pixel.y - cy_;
  return dx * dx + dy * dy <= rim_radius_ * rim_radius_;
}

Grid<uint8_t> FisheyeCamera::image_circle_mask() const {
  Grid<uint8_t> mask(width_, height_, 0);
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      mask.at(x, y) = inside_image_circle({x + 0.5, y + 0.5}) ? 1 : 0;
  return mask;
}

FisheyeCamera FisheyeCamera::from_config(const Config& cfg) {
  const FisheyeCamera def = default_camera();
  const int width = static_cast<int>(cfg.get_int_or("width", def.width()));
  const int height = static_cast<int>(cfg.get_int_or("height", def.height()));
  const double cx = cfg.get_double_or("cx", width / 2.0);
  const double cy = cfg.get_double_or("cy", height / 2.0);
  const double rim = cfg.get_double_or("rim_radius", std::min(width, height) / 2.0);
  CameraPose pose;
  if (cfg.has("cam_position")) {
    const auto p = cfg.get_numbers("cam_position", 3);
    pose.position = {p[0], p[1], p[2]};
  }
  if (cfg.has("cam_rotation")) {
    const auto r = cfg.get_numbers("cam_rotation", 9);
    pose.rotation = Mat3{{r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8]}};
  }
  return FisheyeCamera(width, height, cx, cy, rim, pose);
}

void FisheyeCamera::to_config(Config& cfg) const {
  cfg.set_int("width", width_);
  cfg.set_int("height", height_);
  cfg.set_double("cx", cx_);
  cfg.set_double("cy", cy_);
  cfg.set_double("rim_radius", rim_radius_);
  std::ostringstream pos;
  pos.precision(17);
  pos << pose_.position.x << " " << pose_.position.y << " " << pose_.position.z;
  cfg.set("cam_position", pos.str());
  std::ostringstream rot;
  rot.precision(17);
  for (int i = 0; i < 9; ++i) rot << (i ? " " : "") << pose_.rotation.m[i];
  cfg.set("cam_rotation", rot.str());
}

bool FisheyeCamera::operator==(const FisheyeCamera& o) const {
  return width_ == o.width_ && height_ == o.height_ && cx_ == o.cx_ && cy_ == o.cy_ &&
         rim_radius_ == o.rim_radius_ && pose_.position == o.pose_.position &&
         pose_.rotation == o.pose_.rotation;
}

}  // namespace omniflow
