#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "omniflow/camera.hpp"

using namespace omniflow;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE_BEGIN("camera");

TEST_CASE("default camera geometry") {
  const auto cam = FisheyeCamera::default_camera();
  CHECK(cam.width() == 512);
  CHECK(cam.height() == 512);
  CHECK(cam.cx() == 256.0);
  CHECK(cam.cy() == 256.0);
  CHECK(cam.rim_radius() == 256.0);
  CHECK(cam.radial_scale() == doctest::Approx(256.0 / (kPi / 2.0)).epsilon(1e-15));
  CHECK(cam.pose().position.z == 2.5);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(FisheyeCamera(0, 512, 256, 256, 256), std::invalid_argument);
  CHECK_THROWS_AS(FisheyeCamera(512, 512, 256, 256, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(FisheyeCamera(512, 512, 256, 256, -1.0), std::invalid_argument);
}

TEST_CASE("pixel straight above the principal point maps to theta pi/4, phi 3pi/2") {
  const auto cam = FisheyeCamera::default_camera();
  const auto dir = cam.unproject({256.0, 256.0 - 128.0});
  CHECK(dir.theta == doctest::Approx(kPi / 4.0).epsilon(1e-15));
  CHECK(dir.phi == doctest::Approx(3.0 * kPi / 2.0).epsilon(1e-15));
}

TEST_CASE("unproject of the principal point is the optical axis") {
  const auto cam = FisheyeCamera::default_camera();
  const auto dir = cam.unproject({256.0, 256.0});
  CHECK(dir.theta == 0.0);
  CHECK(dir.phi == 0.0);
}

TEST_CASE("project rejects theta beyond the hemisphere, unproject rejects the outside") {
  const auto cam = FisheyeCamera::default_camera();
  CHECK_THROWS_AS(cam.project({kPi / 2.0 + 1e-6, 0.0}), std::domain_error);
  CHECK_THROWS_AS(cam.project({-1e-9, 0.0}), std::domain_error);
  CHECK_THROWS_AS(cam.unproject({0.0, 0.0}), std::domain_error);  // corner, r = 362 > 256
  CHECK_NOTHROW(cam.project({kPi / 2.0, 1.0}));
  CHECK_NOTHROW(cam.unproject({512.0, 256.0}));  // exactly on the rim
}

TEST_CASE("project/unproject round trip inside the image circle") {
  const auto cam = FisheyeCamera::default_camera();
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> radius(0.0, 256.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double r = radius(rng);
    const double a = angle(rng);
    const PixelCoord p{256.0 + r * std::cos(a), 256.0 + r * std::sin(a)};
    const PixelCoord q = cam.project(cam.unproject(p));
    worst = std::max(worst, std::hypot(q.x - p.x, q.y - p.y));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("image radius is linear in theta") {
  const auto cam = FisheyeCamera::default_camera();
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> theta(1e-6, kPi / 2.0);
  std::uniform_real_distribution<double> phi(0.0, 2.0 * kPi);
  for (int i = 0; i < 1000; ++i) {
    const SphericalDirection d{theta(rng), phi(rng)};
    const PixelCoord p = cam.project(d);
    const double r = std::hypot(p.x - cam.cx(), p.y - cam.cy());
    CHECK(r / d.theta == doctest::Approx(cam.radial_scale()).epsilon(1e-12));
  }
}

TEST_CASE("camera-frame direction components") {
  const Vec3 axis = FisheyeCamera::direction_camera({0.0, 0.0});
  CHECK(axis.x == 0.0);
  CHECK(axis.y == 0.0);
  CHECK(axis.z == 1.0);
  const Vec3 rim = FisheyeCamera::direction_camera({kPi / 2.0, 0.0});
  CHECK(rim.x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(rim.z) < 1e-15);
}

TEST_CASE("world rays of the default downward pose") {
  const auto cam = FisheyeCamera::default_camera();
  const Vec3 down = cam.pixel_ray_world({256.0, 256.0});
  CHECK(down.x == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(down.y == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(down.z == doctest::Approx(-1.0).epsilon(1e-15));

  // image +x at 45 degrees: world +x, still heading down
  const Vec3 slanted = cam.pixel_ray_world({256.0 + 128.0, 256.0});
  CHECK(slanted.x == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(slanted.y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(slanted.z == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-12));

  // image +y points along world -y for the downward pose
  const Vec3 south = cam.pixel_ray_world({256.0, 256.0 + 128.0});
  CHECK(south.y == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("project_world_point") {
  const auto cam = FisheyeCamera::default_camera();

  SUBCASE("point on the optical axis lands on the principal point") {
    const auto p = cam.project_world_point({0.0, 0.0, -1.0});
    REQUIRE(p.has_value());
    CHECK(p->x == doctest::Approx(256.0).epsilon(1e-12));
    CHECK(p->y == doctest::Approx(256.0).epsilon(1e-12));
  }

  SUBCASE("point at the camera height projects onto the rim") {
    const auto p = cam.project_world_point({100.0, 0.0, 2.5});
    REQUIRE(p.has_value());
    CHECK(p->x == doctest::Approx(512.0).epsilon(1e-12));
    CHECK(p->y == doctest::Approx(256.0).epsilon(1e-12));
  }

  SUBCASE("points behind the hemisphere and the camera centre are rejected") {
    CHECK(!cam.project_world_point({0.0, 0.0, 5.0}).has_value());
    CHECK(!cam.project_world_point({0.0, 0.0, 2.5}).has_value());
  }

  SUBCASE("projection inverts the pixel ray") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> radius(0.0, 255.9);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> range(0.5, 20.0);
    for (int i = 0; i < 500; ++i) {
      const double r = radius(rng);
      const double a = angle(rng);
      const PixelCoord pixel{256.0 + r * std::cos(a), 256.0 + r * std::sin(a)};
      const Vec3 point = cam.pose().position + cam.pixel_ray_world(pixel) * range(rng);
      const auto back = cam.project_world_point(point);
      REQUIRE(back.has_value());
      CHECK(std::hypot(back->x - pixel.x, back->y - pixel.y) < 1e-9);
    }
  }
}

TEST_CASE("image circle mask uses pixel centres") {
  const auto cam = FisheyeCamera::default_camera();
  const auto mask = cam.image_circle_mask();
  CHECK(mask.at(256, 256) == 1);
  CHECK(mask.at(0, 0) == 0);
  CHECK(mask.at(0, 256) == 1);  // centre (0.5, 256.5): just inside the rim
  // four-fold symmetry about the principal point
  for (int y = 0; y < 512; y += 31)
    for (int x = 0; x < 512; x += 31) CHECK(mask.at(x, y) == mask.at(511 - x, 511 - y));
}

TEST_CASE("config round trip preserves the camera") {
  const FisheyeCamera cam(320, 240, 160.25, 120.5, 100.0,
                          CameraPose{{1.0, -2.0, 3.5}, Mat3::identity()});
  Config cfg;
  cam.to_config(cfg);
  const FisheyeCamera back = FisheyeCamera::from_config(cfg);
  CHECK(back == cam);
}

TEST_CASE("from_config defaults match the default camera") {
  const FisheyeCamera cam = FisheyeCamera::from_config(Config{});
  CHECK(cam == FisheyeCamera::default_camera());
}

TEST_SUITE_END();
