#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "hairrec/mvs/visibility.hpp"
#include "hairrec/synth/synth.hpp"
#include "helpers.hpp"

using namespace hairrec;

TEST_CASE("render_depth: single point splats a 3x3 block of its depth") {
  const CameraView view = test::axis_camera(1000.0, 1000.0, 32.0, 32.0, 64, 64);
  const std::vector<Vec3> cloud = {{0.0, 0.0, 500.0}};
  const DepthMap depth = mvs::render_depth(view, cloud, 1);

  int finite = 0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (depth.has_geometry(x, y)) ++finite;
  CHECK(finite == 9);
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) CHECK(depth.depth(32 + dx, 32 + dy) == 500.0f);
  CHECK_FALSE(depth.has_geometry(30, 32));
}

TEST_CASE("render_depth: same pixel keeps the minimum depth") {
  const CameraView view = test::axis_camera(1000.0, 1000.0, 32.0, 32.0, 64, 64);
  const std::vector<Vec3> cloud = {{0.0, 0.0, 500.0}, {0.0, 0.0, 400.0}};
  const DepthMap depth = mvs::render_depth(view, cloud, 1);
  CHECK(depth.depth(32, 32) == 400.0f);
}

TEST_CASE("render_depth: point behind camera leaves an all-infinite map") {
  const CameraView view = test::axis_camera(1000.0, 1000.0, 32.0, 32.0, 64, 64);
  const std::vector<Vec3> cloud = {{0.0, 0.0, -100.0}};
  const DepthMap depth = mvs::render_depth(view, cloud, 1);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) CHECK_FALSE(depth.has_geometry(x, y));
}

TEST_CASE("render_depth: shuffling the cloud changes nothing (order independence)") {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> u(-80.0, 80.0);
  std::uniform_real_distribution<double> z(300.0, 900.0);
  std::vector<Vec3> cloud(4000);
  for (auto& p : cloud) p = {u(gen), u(gen), z(gen)};

  const CameraView view = test::axis_camera(500.0, 500.0, 160.0, 120.0, 320, 240);
  const DepthMap a = mvs::render_depth(view, cloud, 1);
  std::shuffle(cloud.begin(), cloud.end(), gen);
  const DepthMap b = mvs::render_depth(view, cloud, 1);
  CHECK(a.raster().data() == b.raster().data());
}

TEST_CASE("render_depth: parallel kernel matches the serial reference exactly") {
  std::mt19937 gen(23);
  std::uniform_real_distribution<double> u(-80.0, 80.0);
  std::uniform_real_distribution<double> z(300.0, 900.0);
  std::vector<Vec3> cloud(10000);
  for (auto& p : cloud) p = {u(gen), u(gen), z(gen)};

  const CameraView view = test::axis_camera(500.0, 500.0, 160.0, 120.0, 320, 240);
  for (int splat : {0, 1, 2}) {
    CAPTURE(splat);
    const DepthMap par = mvs::render_depth(view, cloud, splat);
    const DepthMap ser = mvs::render_depth_serial(view, cloud, splat);
    CHECK(par.raster().data() == ser.raster().data());
  }
}

TEST_CASE("visibility: on-surface 1, tau behind 0, linear midpoint 0.5") {
  const CameraView view = test::axis_camera(1000.0, 1000.0, 32.0, 32.0, 64, 64);
  const std::vector<Vec3> cloud = {{0.0, 0.0, 500.0}};
  const DepthMap depth = mvs::render_depth(view, cloud, 1);

  CHECK(mvs::visibility({0.0, 0.0, 500.0}, view, depth, 5.0) == doctest::Approx(1.0));
  CHECK(mvs::visibility({0.0, 0.0, 505.0}, view, depth, 5.0) == doctest::Approx(0.0));
  CHECK(mvs::visibility({0.0, 0.0, 502.5}, view, depth, 5.0) == doctest::Approx(0.5));
  // In front of the surface: clamped to 1, never above.
  CHECK(mvs::visibility({0.0, 0.0, 490.0}, view, depth, 5.0) == doctest::Approx(1.0));
}

TEST_CASE("visibility: empty pixel (no geometry) counts as visible") {
  const CameraView view = test::axis_camera(1000.0, 1000.0, 32.0, 32.0, 64, 64);
  const DepthMap depth(64, 64);  // all infinite
  CHECK(mvs::visibility({0.0, 0.0, 400.0}, view, depth, 5.0) == doctest::Approx(1.0));
}

TEST_CASE("visibility: outside the image or behind the camera scores 0") {
  const CameraView view = test::axis_camera(1000.0, 1000.0, 32.0, 32.0, 64, 64);
  const DepthMap depth(64, 64);
  CHECK(mvs::visibility({1000.0, 0.0, 100.0}, view, depth, 5.0) == 0.0);
  CHECK(mvs::visibility({0.0, 0.0, -50.0}, view, depth, 5.0) == 0.0);
}

TEST_CASE("visibility is monotone nonincreasing in depth along the ray") {
  const CameraView view = test::axis_camera(1000.0, 1000.0, 32.0, 32.0, 64, 64);
  const std::vector<Vec3> cloud = {{0.0, 0.0, 500.0}};
  const DepthMap depth = mvs::render_depth(view, cloud, 1);

  double prev = 2.0;
  for (double z = 495.0; z <= 510.0; z += 0.25) {
    const double v = mvs::visibility({0.0, 0.0, z}, view, depth, 5.0);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("classify_interior on a synthetic sphere cloud: hull false, center true") {
  // Points on a sphere of radius 60 around the origin, cameras on a ring.
  std::vector<Vec3> cloud;
  for (int i = 0; i < 20000; ++i) {
    const double z = -1.0 + 2.0 * (i + 0.5) / 20000.0;
    const double az = 2.399963 * i;  // golden-angle spiral: near-uniform cover
    const double r = std::sqrt(1.0 - z * z);
    cloud.push_back(60.0 * Vec3(r * std::cos(az), r * std::sin(az), z));
  }
  const auto views = synth::ring_rig(Vec3::Zero(), 500.0, 600.0, 320, 240, 12, {{0.0, 40.0}});
  std::vector<DepthMap> depths;
  for (const auto& v : views) depths.push_back(mvs::render_depth(v, cloud, 2));

  // Brute-force oracle: visible iff V > 0 in some view.
  int surface_checked = 0;
  for (size_t i = 0; i < cloud.size(); i += 97) {
    bool oracle_visible = false;
    for (size_t k = 0; k < views.size(); ++k)
      if (mvs::visibility(cloud[i], views[k], depths[k], 5.0) > 0.0) oracle_visible = true;
    CHECK(mvs::classify_interior(cloud[i], views, depths, 5.0) == !oracle_visible);
    ++surface_checked;
  }
  CHECK(surface_checked > 20);

  // A point on the hull facing a camera is exterior; the center is interior.
  CHECK_FALSE(mvs::classify_interior({60.0, 0.0, 0.0}, views, depths, 5.0));
  CHECK(mvs::classify_interior(Vec3::Zero(), views, depths, 5.0));
}

TEST_CASE("classify_interior: single view, point in front of the surface is exterior") {
  const CameraView view = test::axis_camera(1000.0, 1000.0, 32.0, 32.0, 64, 64);
  const std::vector<Vec3> cloud = {{0.0, 0.0, 500.0}};
  std::vector<CameraView> views = {view};
  std::vector<DepthMap> depths = {mvs::render_depth(view, cloud, 1)};
  CHECK_FALSE(mvs::classify_interior({0.0, 0.0, 480.0}, views, depths, 5.0));
  CHECK(mvs::classify_interior({0.0, 0.0, 520.0}, views, depths, 5.0));
}
