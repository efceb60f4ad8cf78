#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "doctest.h"
#include "omniflow/renderer.hpp"

using namespace omniflow;

namespace {

double component(const Vec3& v, int axis) { return axis == 0 ? v.x : axis == 1 ? v.y : v.z; }

/// Cube intersection by testing all six face rectangles directly; smallest
/// positive hit wins. Independent of the slab walk in cast_ray.
std::optional<Vec3> face_plane_hit(const Vec3& origin, const Vec3& dir, const CubeState& cube) {
  const double he = cube.half_extent;
  double best_t = std::numeric_limits<double>::infinity();
  std::optional<Vec3> best;
  for (int axis = 0; axis < 3; ++axis) {
    const double d = component(dir, axis);
    if (d == 0.0) continue;
    for (double side : {+1.0, -1.0}) {
      const double plane = component(cube.center, axis) + side * he;
      const double t = (plane - component(origin, axis)) / d;
      if (!(t > 0.0) || t >= best_t) continue;
      const Vec3 p = origin + dir * t;
      bool on_face = true;
      for (int k = 0; k < 3; ++k) {
        if (k == axis) continue;
        if (std::fabs(component(p, k) - component(cube.center, k)) > he) on_face = false;
      }
      if (on_face) {
        best_t = t;
        best = p;
      }
    }
  }
  return best;
}

FisheyeCamera small_camera() { return FisheyeCamera(128, 128, 64.0, 64.0, 64.0); }

SequenceSpec small_spec(const std::string& name) {
  SequenceSpec spec = builtin_sequence(name);
  spec.camera = small_camera();
  return spec;
}

}  // namespace

TEST_SUITE_BEGIN("renderer");

TEST_CASE("ray straight down hits the cube top") {
  const CubeState cube{{0, 0, 0}, 1.0};
  const Hit hit = cast_ray({0, 0, 2.5}, {0, 0, -1}, cube);
  CHECK(hit.kind == HitKind::cube);
  CHECK(hit.face == 4);  // +z
  CHECK(hit.distance == doctest::Approx(1.5).epsilon(1e-12));
  CHECK((hit.point - Vec3{0, 0, 1}).norm() < 1e-12);
}

TEST_CASE("axis-aligned ray from the side reports the entry face") {
  const CubeState cube{{0, 0, 0}, 1.0};
  const Hit hit = cast_ray({-5, 0, 0}, {1, 0, 0}, cube);
  CHECK(hit.kind == HitKind::cube);
  CHECK(hit.face == 1);  // -x
  CHECK(hit.distance == doctest::Approx(4.0).epsilon(1e-12));
  CHECK((hit.point - Vec3{-1, 0, 0}).norm() < 1e-12);
}

TEST_CASE("ray from inside the cube exits through the far face") {
  const CubeState cube{{0, 0, 0}, 1.0};
  const Hit hit = cast_ray({0, 0, 0}, {1, 0, 0}, cube);
  CHECK(hit.kind == HitKind::cube);
  CHECK(hit.face == 0);  // +x
  CHECK(hit.distance == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((hit.point - Vec3{1, 0, 0}).norm() < 1e-12);
}

TEST_CASE("missed cube falls through to the floor plane") {
  const CubeState far_cube{{50, 0, 0}, 1.0};
  const Hit hit = cast_ray({0.2, 0.3, 2.5}, {0, 0, -1}, far_cube);
  CHECK(hit.kind == HitKind::floor);
  CHECK(hit.distance == doctest::Approx(3.5).epsilon(1e-12));
  CHECK((hit.point - Vec3{0.2, 0.3, kFloorZ}).norm() < 1e-12);
}

TEST_CASE("horizontal, upward and too-shallow rays reach the horizon") {
  const CubeState cube{{0, 50, 0}, 1.0};  // off the +x corridor probed below
  for (const Vec3 dir : {Vec3{0, 1, 0}, Vec3{0, 0, 1}}) {
    const Hit hit = cast_ray({0, 0, 2.5}, dir, cube);
    CHECK(hit.kind == HitKind::horizon);
    CHECK(std::isinf(hit.distance));
  }
  // floor intersection beyond the far limit counts as horizon too
  const Vec3 shallow = Vec3{1, 0, -0.03}.normalized();
  CHECK(cast_ray({0, 0, 2.5}, shallow, cube).kind == HitKind::horizon);
  const Vec3 steeper = Vec3{1, 0, -0.05}.normalized();
  const Hit floor_hit = cast_ray({0, 0, 2.5}, steeper, cube);
  CHECK(floor_hit.kind == HitKind::floor);
  CHECK(floor_hit.distance <= kFarLimit);
}

TEST_CASE("ray parallel to a slab outside it misses the cube") {
  const CubeState cube{{0, 0, 0}, 1.0};
  const Hit hit = cast_ray({0, 3, 0}, {1, 0, 0}, cube);
  CHECK(hit.kind == HitKind::horizon);
}

TEST_CASE("cube hit points land on the cube surface") {
  const CubeState cube{{1.0, -0.5, 0.25}, 0.75};
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> pos(-4.0, 4.0);
  int hits = 0;
  for (int i = 0; i < 5000; ++i) {
    const Vec3 origin{pos(rng), pos(rng), pos(rng) + 4.0};  // above and around
    const Vec3 target{cube.center.x + pos(rng) / 4.0, cube.center.y + pos(rng) / 4.0,
                      cube.center.z + pos(rng) / 4.0};
    const Vec3 dir = (target - origin).normalized();
    const Hit hit = cast_ray(origin, dir, cube);
    if (hit.kind != HitKind::cube) continue;
    ++hits;
    const double m =
        std::max({std::fabs(hit.point.x), std::fabs(hit.point.y), std::fabs(hit.point.z)});
    CHECK(m == doctest::Approx(cube.half_extent).epsilon(1e-10));
    // the reported face matches the dominant coordinate
    const int axis = hit.face / 2;
    const double sign = (hit.face % 2 == 0) ? 1.0 : -1.0;
    CHECK(component(hit.point, axis) * sign == doctest::Approx(cube.half_extent).epsilon(1e-10));
    // world hit point sits at distance along the ray
    const Vec3 world = cube.center + hit.point;
    CHECK((world - (origin + dir * hit.distance)).norm() < 1e-9);
  }
  CHECK(hits > 1000);  // the sampling actually exercises the cube branch
}

TEST_CASE("rendering is deterministic") {
  const SequenceSpec spec = small_spec("linec-1");
  const FrameRender a = render_frame(spec, 3);
  const FrameRender b = render_frame(spec, 3);
  CHECK(a.image == b.image);
  CHECK(a.fg_mask == b.fg_mask);
}

TEST_CASE("pixels outside the image circle stay black and unmasked") {
  const SequenceSpec spec = small_spec("linec-1");
  const FrameRender r = render_frame(spec, 0);
  const uint8_t* corner = r.image.pixel(0, 0);
  CHECK(corner[0] == 0);
  CHECK(corner[1] == 0);
  CHECK(corner[2] == 0);
  CHECK(r.fg_mask.at(0, 0) == 0);
  CHECK(r.fg_mask.at(spec.camera.width() - 1, spec.camera.height() - 1) == 0);
}

TEST_CASE("scene colors: floor checker, horizon ring and textured cube all appear") {
  const SequenceSpec spec = small_spec("linec-1");
  const FrameRender r = render_frame(spec, 0);
  int floor_dark = 0, floor_light = 0, horizon = 0, fg = 0;
  for (int y = 0; y < r.image.height; ++y) {
    for (int x = 0; x < r.image.width; ++x) {
      const uint8_t* p = r.image.pixel(x, y);
      if (p[0] == 60 && p[1] == 60 && p[2] == 60) ++floor_dark;
      if (p[0] == 95 && p[1] == 95 && p[2] == 95) ++floor_light;
      if (p[0] == 45 && p[1] == 45 && p[2] == 50) ++horizon;
      if (r.fg_mask.at(x, y)) ++fg;
    }
  }
  CHECK(floor_dark > 0);
  CHECK(floor_light > 0);
  CHECK(horizon > 0);
  CHECK(fg > 0);
}

TEST_CASE("homogeneous texture renders the cube in one flat gray") {
  const SequenceSpec spec = small_spec("linec-1-flat");
  const FrameRender r = render_frame(spec, 0);
  int fg = 0;
  for (int y = 0; y < r.image.height; ++y) {
    for (int x = 0; x < r.image.width; ++x) {
      if (!r.fg_mask.at(x, y)) continue;
      ++fg;
      const uint8_t* p = r.image.pixel(x, y);
      CHECK(p[0] == 128);
      CHECK(p[1] == 128);
      CHECK(p[2] == 128);
    }
  }
  CHECK(fg > 0);
}

TEST_CASE("checkered cube shows more than one color and follows the seed") {
  SequenceSpec spec = small_spec("linec-1");
  const FrameRender a = render_frame(spec, 0);
  int fg = 0;
  bool varied = false;
  const uint8_t* first = nullptr;
  for (int y = 0; y < a.image.height && !varied; ++y) {
    for (int x = 0; x < a.image.width; ++x) {
      if (!a.fg_mask.at(x, y)) continue;
      ++fg;
      const uint8_t* p = a.image.pixel(x, y);
      if (!first) first = p;
      if (p[0] != first[0] || p[1] != first[1] || p[2] != first[2]) {
        varied = true;
        break;
      }
    }
  }
  CHECK(fg > 0);
  CHECK(varied);

  spec.seed = 2;
  const FrameRender b = render_frame(spec, 0);
  CHECK(a.fg_mask == b.fg_mask);       // geometry ignores the seed
  CHECK_FALSE(a.image == b.image);     // texture colors do not
}

TEST_CASE("foreground mask agrees with direct face-rectangle intersection") {
  const SequenceSpec spec = small_spec("spiral-2");
  const int frame = 5;
  const FrameRender r = render_frame(spec, frame);
  const CubeState cube = cube_state_at_frame(spec, frame);
  const Grid<uint8_t> inside = spec.camera.image_circle_mask();
  const Vec3 origin = spec.camera.pose().position;
  int mismatches = 0;
  for (int y = 0; y < r.fg_mask.height(); ++y) {
    for (int x = 0; x < r.fg_mask.width(); ++x) {
      bool expected = false;
      if (inside.at(x, y)) {
        const Vec3 dir = spec.camera.pixel_ray_world({x + 0.5, y + 0.5});
        expected = face_plane_hit(origin, dir, cube).has_value();
      }
      if (expected != (r.fg_mask.at(x, y) != 0)) ++mismatches;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("camera looking up sees only horizon") {
  CameraPose up;
  up.rotation = Mat3::from_cols({1, 0, 0}, {0, 1, 0}, {0, 0, 1});
  SequenceSpec spec = small_spec("linec-1");
  spec.camera = FisheyeCamera(64, 64, 32.0, 32.0, 32.0, up);
  const FrameRender r = render_frame(spec, 0);
  const Grid<uint8_t> inside = spec.camera.image_circle_mask();
  for (int y = 0; y < r.image.height; ++y) {
    for (int x = 0; x < r.image.width; ++x) {
      CHECK(r.fg_mask.at(x, y) == 0);
      const uint8_t* p = r.image.pixel(x, y);
      if (inside.at(x, y)) {
        CHECK(p[0] == 45);
        CHECK(p[2] == 50);
      } else {
        CHECK(p[0] == 0);
      }
    }
  }
}

TEST_CASE("static cube produces zero flow everywhere inside the circle") {
  const FisheyeCamera cam = small_camera();
  const CubeState cube{{-1.0, 0.5, 0.0}, 1.0};
  const FlowField flow = ground_truth_flow_between(cam, cube, cube);
  const Grid<uint8_t> inside = cam.image_circle_mask();
  double worst = 0.0;
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      if (!inside.at(x, y)) {
        CHECK_FALSE(flow.valid(x, y));
        continue;
      }
      REQUIRE(flow.valid(x, y));
      worst = std::max({worst, std::fabs(static_cast<double>(flow.u(x, y))),
                        std::fabs(static_cast<double>(flow.v(x, y)))});
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("background flow is exactly zero while the cube moves") {
  const SequenceSpec spec = small_spec("linec-2");
  const FlowField flow = ground_truth_flow(spec, 10);
  const FrameRender r = render_frame(spec, 10);
  const Grid<uint8_t> inside = spec.camera.image_circle_mask();
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      if (!inside.at(x, y) || r.fg_mask.at(x, y)) continue;
      CHECK(flow.valid(x, y));
      CHECK(flow.u(x, y) == 0.0f);
      CHECK(flow.v(x, y) == 0.0f);
    }
  }
}

TEST_CASE("foreground flow reprojects each surface point onto its target ray") {
  const FisheyeCamera cam = small_camera();
  const CubeState from{{-1.2, 0.4, 0.0}, 1.0};
  const CubeState to{{-1.0, 0.55, 0.0}, 1.0};
  const FlowField flow = ground_truth_flow_between(cam, from, to);
  const Grid<uint8_t> inside = cam.image_circle_mask();
  const Vec3 origin = cam.pose().position;
  const Vec3 motion = to.center - from.center;
  int checked = 0;
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      if (!inside.at(x, y)) continue;
      const Vec3 dir = cam.pixel_ray_world({x + 0.5, y + 0.5});
      const auto hit = face_plane_hit(origin, dir, from);
      if (!hit) {
        CHECK(flow.u(x, y) == 0.0f);
        CHECK(flow.v(x, y) == 0.0f);
        continue;
      }
      if (!flow.valid(x, y)) continue;  // moved behind the hemisphere
      ++checked;
      const Vec3 moved = *hit + motion;
      const PixelCoord target{x + 0.5 + flow.u(x, y), y + 0.5 + flow.v(x, y)};
      const Vec3 target_ray = cam.pixel_ray_world(target);
      const Vec3 to_moved = (moved - origin).normalized();
      CHECK(to_moved.cross(target_ray).norm() < 1e-5);
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("motion along +x produces positive mean horizontal flow") {
  const FisheyeCamera cam = small_camera();
  const CubeState from{{-2.5, 0.0, 0.0}, 1.0};
  const CubeState to{{-2.3, 0.0, 0.0}, 1.0};
  const FlowField flow = ground_truth_flow_between(cam, from, to);
  double sum_u = 0.0;
  long long n = 0;
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      if (!flow.valid(x, y)) continue;
      if (flow.u(x, y) == 0.0f && flow.v(x, y) == 0.0f) continue;  // background
      sum_u += flow.u(x, y);
      ++n;
    }
  }
  REQUIRE(n > 0);
  CHECK(sum_u / static_cast<double>(n) > 0.0);
}

TEST_CASE("flow rejects mismatched cube sizes and frames without successors") {
  const FisheyeCamera cam = small_camera();
  CHECK_THROWS_AS(
      ground_truth_flow_between(cam, CubeState{{0, 0, 0}, 1.0}, CubeState{{0, 0, 0}, 2.0}),
      std::invalid_argument);
  const SequenceSpec spec = small_spec("line-1");
  CHECK_THROWS_AS(ground_truth_flow(spec, spec.frame_count - 1), std::invalid_argument);
  CHECK_THROWS_AS(ground_truth_flow(spec, -1), std::invalid_argument);
}

TEST_SUITE_END();
