#include "omniflow/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace omniflow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Scene palette.
constexpr uint8_t kHorizonColor[3] = {45, 45, 50};
constexpr uint8_t kFloorDark[3] = {60, 60, 60};
constexpr uint8_t kFloorLight[3] = {95, 95, 95};
constexpr uint8_t kCubeFlat[3] = {128, 128, 128};
constexpr double kFloorCell = 1.0;  // metres
constexpr int kFaceCells = 8;       // checker cells per cube edge

uint64_t splitmix64(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct FacePalette {
  uint8_t light[6][3];
  uint8_t dark[6][3];
};

// Two checker colors per face, drawn from one seed-keyed stream. Light
// channels land in [160, 255], dark in [0, 95], keeping face contrast high.
FacePalette face_palette(uint64_t seed) {
  FacePalette p;
  uint64_t state = seed;
  for (int face = 0; face < 6; ++face) {
    for (int c = 0; c < 3; ++c) p.light[face][c] = static_cast<uint8_t>(160 + splitmix64(state) % 96);
    for (int c = 0; c < 3; ++c) p.dark[face][c] = static_cast<uint8_t>(splitmix64(state) % 96);
  }
  return p;
}

// Cached per-pixel rays: unprojecting 512x512 pixels dominates the cost of
// rendering a frame otherwise.
struct RayTable {
  FisheyeCamera camera;
  std::vector<Vec3> dirs;       // world-space unit rays at pixel centres
  Grid<uint8_t> inside;         // image-circle mask

  explicit RayTable(const FisheyeCamera& cam)
      : camera(cam), inside(cam.image_circle_mask()) {
    dirs.resize(static_cast<size_t>(cam.width()) * cam.height());
    for (int y = 0; y < cam.height(); ++y) {
      for (int x = 0; x < cam.width(); ++x) {
        if (!inside.at(x, y)) continue;
        dirs[static_cast<size_t>(y) * cam.width() + x] =
            cam.pixel_ray_world({x + 0.5, y + 0.5});
      }
    }
  }
};

std::shared_ptr<const RayTable> ray_table_for(const FisheyeCamera& cam) {
  static std::mutex mu;
  static std::vector<std::shared_ptr<const RayTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  for (const auto& entry : cache)
    if (entry->camera == cam) return entry;
  auto table = std::make_shared<const RayTable>(cam);
  if (cache.size() >= 8) cache.erase(cache.begin());
  cache.push_back(table);
  return table;
}

void face_uv(int face, const Vec3& local, double& u, double& v) {
  switch (face / 2) {
    case 0: u = local.y; v = local.z; break;  // +-x
    case 1: u = local.x; v = local.z; break;  // +-y
    default: u = local.x; v = local.y; break; // +-z
  }
}

int checker_cell(double coord, double half_extent) {
  const int cell = static_cast<int>(std::floor((coord + half_extent) / (2.0 * half_extent) *
                                               kFaceCells));
  return std::clamp(cell, 0, kFaceCells - 1);
}

void shade(const Hit& hit, const CubeState& cube, TextureMode texture, const FacePalette& palette,
           uint8_t rgb[3]) {
  switch (hit.kind) {
    case HitKind::horizon:
      rgb[0] = kHorizonColor[0];
      rgb[1] = kHorizonColor[1];
      rgb[2] = kHorizonColor[2];
      return;
    case HitKind::floor: {
      const long long px = static_cast<long long>(std::floor(hit.point.x / kFloorCell));
      const long long py = static_cast<long long>(std::floor(hit.point.y / kFloorCell));
      const uint8_t* c = ((px + py) & 1) ? kFloorLight : kFloorDark;
      rgb[0] = c[0];
      rgb[1] = c[1];
      rgb[2] = c[2];
      return;
    }
    case HitKind::cube: {
      if (texture == TextureMode::homogeneous) {
        rgb[0] = kCubeFlat[0];
        rgb[1] = kCubeFlat[1];
        rgb[2] = kCubeFlat[2];
        return;
      }
      double u = 0.0, v = 0.0;
      face_uv(hit.face, hit.point, u, v);
      const int cu = checker_cell(u, cube.half_extent);
      const int cv = checker_cell(v, cube.half_extent);
      const uint8_t* c =
          ((cu + cv) & 1) ? palette.dark[hit.face] : palette.light[hit.face];
      rgb[0] = c[0];
      rgb[1] = c[1];
      rgb[2] = c[2];
      return;
    }
  }
}

}  // namespace

Hit cast_ray(const Vec3& origin, const Vec3& dir, const CubeState& cube) {
  const double o[3] = {origin.x - cube.center.x, origin.y - cube.center.y,
                       origin.z - cube.center.z};
  const double d[3] = {dir.x, dir.y, dir.z};
  const double he = cube.half_extent;

  double tmin = -kInf, tmax = kInf;
  int face_min = -1, face_max = -1;
  bool miss = false;
  for (int axis = 0; axis < 3 && !miss; ++axis) {
    if (d[axis] == 0.0) {
      if (o[axis] < -he || o[axis] > he) miss = true;
      continue;
    }
    double t1 = (-he - o[axis]) / d[axis];
    double t2 = (he - o[axis]) / d[axis];
    int f1 = axis * 2 + 1;  // negative side
    int f2 = axis * 2;      // positive side
    if (t1 > t2) {
      std::swap(t1, t2);
      std::swap(f1, f2);
    }
    if (t1 > tmin) {
      tmin = t1;
      face_min = f1;
    }
    if (t2 < tmax) {
      tmax = t2;
      face_max = f2;
    }
  }
  if (!miss && tmin <= tmax && tmax > 0.0) {
    const bool outside = tmin > 0.0;
    const double t = outside ? tmin : tmax;  // tmax covers a ray origin inside the cube
    const int face = outside ? face_min : face_max;
    const Vec3 local{o[0] + d[0] * t, o[1] + d[1] * t, o[2] + d[2] * t};
    return Hit{HitKind::cube, face, local, t};
  }

  if (d[2] != 0.0) {
    const double t = (kFloorZ - origin.z) / d[2];
    if (t > 0.0 && t <= kFarLimit)
      return Hit{HitKind::floor, -1, origin + dir * t, t};
  }
  return Hit{HitKind::horizon, -1, Vec3{}, kInf};
}

FrameRender render_frame(const SequenceSpec& spec, int frame) {
  const CubeState cube = cube_state_at_frame(spec, frame);
  const auto rays = ray_table_for(spec.camera);
  const FacePalette palette = face_palette(spec.seed);
  const int w = spec.camera.width();
  const int h = spec.camera.height();
  const Vec3 origin = spec.camera.pose().position;

  FrameRender out{Image8(w, h, 3), Grid<uint8_t>(w, h, 0)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!rays->inside.at(x, y)) continue;  // stays black
      const Hit hit = cast_ray(origin, rays->dirs[static_cast<size_t>(y) * w + x], cube);
      uint8_t rgb[3];
      shade(hit, cube, spec.texture, palette, rgb);
      out.image.set_rgb(x, y, rgb[0], rgb[1], rgb[2]);
      if (hit.kind == HitKind::cube) out.fg_mask.at(x, y) = 255;
    }
  }
  return out;
}

FlowField ground_truth_flow_between(const FisheyeCamera& camera, const CubeState& from,
                                    const CubeState& to) {
  if (from.half_extent != to.half_extent)
    throw std::invalid_argument("ground truth flow: cube size must not change");
  const auto rays = ray_table_for(camera);
  const int w = camera.width();
  const int h = camera.height();
  const Vec3 origin = camera.pose().position;
  const Vec3 motion = to.center - from.center;

  FlowField flow(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!rays->inside.at(x, y)) {
        flow.set_invalid(x, y);
        continue;
      }
      const Hit hit = cast_ray(origin, rays->dirs[static_cast<size_t>(y) * w + x], from);
      if (hit.kind != HitKind::cube) continue;  // static background: zero flow
      const Vec3 moved = from.center + hit.point + motion;
      const auto reprojected = camera.project_world_point(moved);
      if (!reprojected) {
        flow.set_invalid(x, y);
        continue;
      }
      flow.set(x, y, static_cast<float>(reprojected->x - (x + 0.5)),
               static_cast<float>(reprojected->y - (y + 0.5)));
    }
  }
  return flow;
}

FlowField ground_truth_flow(const SequenceSpec& spec, int frame) {
  if (frame < 0 || frame + 1 >= spec.frame_count)
    throw std::invalid_argument("ground truth flow: frame must have a successor");
  return ground_truth_flow_between(spec.camera, cube_state_at_frame(spec, frame),
                                   cube_state_at_frame(spec, frame + 1));
}

}  // namespace omniflow
