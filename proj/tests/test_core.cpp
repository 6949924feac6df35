#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "hairrec/core/errors.hpp"
#include "hairrec/core/grid.hpp"
#include "hairrec/core/io.hpp"
#include "hairrec/core/kdtree.hpp"
#include "hairrec/core/types.hpp"
#include "helpers.hpp"

using namespace hairrec;
using test::TempFile;

TEST_CASE("projection: principal axis and similar triangles") {
  CameraView view = test::axis_camera(1000.0, 1000.0, 640.0, 360.0);

  auto on_axis = view.project({0.0, 0.0, 100.0});
  REQUIRE(on_axis.has_value());
  CHECK(on_axis->uv.x() == doctest::Approx(640.0));
  CHECK(on_axis->uv.y() == doctest::Approx(360.0));
  CHECK(on_axis->depth == doctest::Approx(100.0));

  auto off_axis = view.project({10.0, 0.0, 100.0});
  REQUIRE(off_axis.has_value());
  CHECK(off_axis->uv.x() == doctest::Approx(740.0));
  CHECK(off_axis->uv.y() == doctest::Approx(360.0));
}

TEST_CASE("projection: behind camera yields no result, never NaN") {
  CameraView view = test::axis_camera();
  CHECK_FALSE(view.project({0.0, 0.0, -5.0}).has_value());
  CHECK_FALSE(view.project({0.0, 0.0, 0.0}).has_value());
}

TEST_CASE("projection round trip: backproject(project(p)) == p within 1e-6 mm") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> coord(-200.0, 200.0);
  std::uniform_real_distribution<double> depth(50.0, 2000.0);

  // A rotated+translated camera, not just the identity pose.
  const CameraView view = make_lookat_camera({300.0, -120.0, 80.0}, {0.0, 0.0, 0.0},
                                             Vec3::UnitZ(), 900.0, 850.0, 1280, 720);
  view.validate();

  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(coord(gen), coord(gen), coord(gen));
    const auto pd = view.project(p);
    if (!pd) continue;
    const Vec3 back = view.backproject(pd->uv, pd->depth);
    CHECK((back - p).norm() < 1e-6);
  }
}

TEST_CASE("camera validation rejects non-orthonormal rotation") {
  CameraView view = test::axis_camera();
  view.validate();  // identity is fine
  view.rotation(0, 0) = 1.5;
  CHECK_THROWS_AS(view.validate(), ValidationError);
}

TEST_CASE("strand binary round trip is bitwise exact") {
  StrandSet set;
  set.strands.push_back({{{0.0, 1.25, -3.5}, {4.0, 5.0, 6.0}}, false});
  set.strands.push_back({{{7.5, -8.25, 9.0}, {1.0, 0.5, 0.25}, {2.0, 4.0, 8.0}}, true});

  TempFile file(".bin");
  save_strands(file.str(), set);
  const StrandSet loaded = load_strands(file.str());

  REQUIRE(loaded.size() == set.size());
  for (size_t s = 0; s < set.size(); ++s) {
    REQUIRE(loaded.strands[s].vertices.size() == set.strands[s].vertices.size());
    for (size_t v = 0; v < set.strands[s].vertices.size(); ++v)
      for (int c = 0; c < 3; ++c) {
        const float a = static_cast<float>(set.strands[s].vertices[v][c]);
        const float b = static_cast<float>(loaded.strands[s].vertices[v][c]);
        CHECK(a == b);  // bitwise: format stores f32
      }
  }
}

TEST_CASE("truncated strand file raises a truncation error naming the strand") {
  StrandSet set;
  set.strands.push_back({{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {2.0, 2.0, 2.0}}, false});
  set.strands.push_back({{{3.0, 3.0, 3.0}, {4.0, 4.0, 4.0}}, false});

  TempFile file(".bin");
  save_strands(file.str(), set);

  // Chop off the last 8 bytes (inside strand 1's payload).
  auto bytes = test::read_bytes(file.path);
  bytes.resize(bytes.size() - 8);
  std::ofstream(file.str(), std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()), bytes.size());

  try {
    load_strands(file.str());
    FAIL("expected TruncatedFileError");
  } catch (const TruncatedFileError& e) {
    CHECK(std::string(e.what()).find("strand 1") != std::string::npos);
  }
}

TEST_CASE("strand file with bad magic/garbage header is a malformed-header error") {
  TempFile file(".bin");
  std::ofstream(file.str(), std::ios::binary) << "nonsense";
  CHECK_THROWS_AS(load_strands(file.str()), TruncatedFileError);
  CHECK_THROWS_AS(load_strands("/nonexistent/path/q.bin"), FileError);
}

TEST_CASE("PLY round trip preserves points and directions (binary and ascii)") {
  PointCloud cloud;
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 64; ++i) {
    cloud.points.push_back({u(gen), u(gen), u(gen)});
    cloud.directions.push_back(Vec3(u(gen), u(gen), u(gen)).normalized());
  }

  for (bool binary : {true, false}) {
    CAPTURE(binary);
    TempFile file(".ply");
    save_ply(file.str(), cloud, binary);
    const PointCloud loaded = load_ply(file.str());
    REQUIRE(loaded.points.size() == cloud.points.size());
    REQUIRE(loaded.has_directions());
    for (size_t i = 0; i < cloud.points.size(); ++i) {
      CHECK((loaded.points[i] - cloud.points[i]).norm() < 1e-4);
      // Direction signs are canonicalized at save time; compare as lines.
      const Vec3 a = cloud.directions[i], b = loaded.directions[i];
      CHECK(std::min((a - b).norm(), (a + b).norm()) < 1e-4);
    }
  }
}

TEST_CASE("malformed PLY raises distinct errors") {
  TempFile file(".ply");
  {
    std::ofstream out(file.str());
    out << "ply\nformat ascii 1.0\nelement vertex 10\nproperty float x\nproperty float y\n"
        << "property float z\nend_header\n0 0 0\n";  // claims 10, has 1
  }
  CHECK_THROWS_AS(load_ply(file.str()), TruncatedFileError);

  TempFile bad(".ply");
  std::ofstream(bad.str()) << "not a ply\n";
  CHECK_THROWS_AS(load_ply(bad.str()), MalformedHeaderError);
}

TEST_CASE("camera set round trip; non-orthonormal rotation rejected on load") {
  std::vector<CameraView> views;
  views.push_back(make_lookat_camera({600.0, 0.0, 0.0}, Vec3::Zero(), Vec3::UnitZ(), 700.0,
                                     710.0, 960, 540));
  views.push_back(make_lookat_camera({0.0, 600.0, 100.0}, Vec3::Zero(), Vec3::UnitZ(), 800.0,
                                     790.0, 1280, 720));

  TempFile file(".txt");
  save_cameras(file.str(), views);
  const auto loaded = load_cameras(file.str());
  REQUIRE(loaded.size() == views.size());
  for (size_t i = 0; i < views.size(); ++i) {
    CHECK((loaded[i].rotation - views[i].rotation).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((loaded[i].translation - views[i].translation).norm() < 1e-9);
    CHECK(loaded[i].fx == doctest::Approx(views[i].fx));
    CHECK(loaded[i].width == views[i].width);
  }

  // Rotations are validated on load, not on save: write a scaled one.
  views[0].rotation *= 1.01;
  TempFile bad(".txt");
  save_cameras(bad.str(), views);
  CHECK_THROWS_AS(load_cameras(bad.str()), ValidationError);
}

TEST_CASE("raster round trip: 1- and 2-channel f32 with header validation") {
  for (int channels : {1, 2}) {
    CAPTURE(channels);
    Image img(7, 5, channels);
    for (size_t i = 0; i < img.data().size(); ++i) img.data()[i] = static_cast<float>(i) * 0.25f;

    TempFile file(".hrrf");
    save_raster(file.str(), img);
    const Image loaded = load_raster(file.str());
    REQUIRE(loaded.width() == 7);
    REQUIRE(loaded.height() == 5);
    REQUIRE(loaded.channels() == channels);
    CHECK(loaded.data() == img.data());
  }

  TempFile garbage(".hrrf");
  std::ofstream(garbage.str(), std::ios::binary) << "XXXXYYYYZZZZWWWW";
  CHECK_THROWS_AS(load_raster(garbage.str()), MalformedHeaderError);

  // Header promising more payload than present.
  Image img(4, 4, 1);
  TempFile trunc(".hrrf");
  save_raster(trunc.str(), img);
  auto bytes = test::read_bytes(trunc.path);
  bytes.resize(bytes.size() - 4);
  std::ofstream(trunc.str(), std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  CHECK_THROWS_AS(load_raster(trunc.str()), TruncatedFileError);
}

TEST_CASE("orientation grid round trip: occupancy, spec and directions (f16 precision)") {
  GridSpec spec;
  spec.dims = {9, 8, 7};
  spec.origin = {-4.0, 2.5, 11.0};
  spec.voxel_size = 2.5;
  OrientationGrid grid(spec);

  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> di(0, 8), dj(0, 7), dk(0, 6);
  for (int n = 0; n < 60; ++n) {
    const Vec3f d = Vec3(u(gen), u(gen), u(gen)).normalized().cast<float>();
    grid.set(di(gen) % 9, dj(gen) % 8, dk(gen) % 7, d);
  }

  TempFile file(".grid");
  save_grid(file.str(), grid);
  const OrientationGrid loaded = load_grid(file.str());
  REQUIRE(loaded.spec() == spec);

  size_t occupied = 0;
  for (int k = 0; k < 7; ++k)
    for (int j = 0; j < 8; ++j)
      for (int i = 0; i < 9; ++i) {
        REQUIRE(loaded.occupied(i, j, k) == grid.occupied(i, j, k));
        if (!grid.occupied(i, j, k)) continue;
        ++occupied;
        const Vec3f a = grid.direction(i, j, k), b = loaded.direction(i, j, k);
        // f16 rounding plus sign canonicalization: compare as lines.
        CHECK(std::min((a - b).norm(), (a + b).norm()) < 2e-3f);
      }
  CHECK(occupied > 0);
}

TEST_CASE("half-float conversion: exact on halves, round-to-nearest-even") {
  CHECK(half_to_float(float_to_half(0.0f)) == 0.0f);
  CHECK(half_to_float(float_to_half(1.0f)) == 1.0f);
  CHECK(half_to_float(float_to_half(-2.5f)) == -2.5f);
  CHECK(half_to_float(float_to_half(65504.0f)) == 65504.0f);  // max finite half
  // 1 + 2^-11 rounds to 1.0 (nearest even), 1 + 3*2^-12 rounds up.
  CHECK(half_to_float(float_to_half(1.0f + 0x1p-11f)) == 1.0f);
  CHECK(half_to_float(float_to_half(1.0f + 3 * 0x1p-12f)) == 1.0f + 0x1p-10f);
  for (float f : {0.1f, 3.14159f, -17.25f, 1e-4f}) {
    const float r = half_to_float(float_to_half(f));
    CHECK(std::abs(r - f) <= std::abs(f) * 1e-3f + 1e-7f);
  }
}

TEST_CASE("LineMap construction dedups points closer than the sample spacing") {
  std::vector<OrientedPoint> pts;
  pts.push_back({{0.0, 0.0, 0.0}, Vec3::UnitX()});
  pts.push_back({{0.1, 0.0, 0.0}, Vec3::UnitX()});  // 0.1 mm away: dropped
  pts.push_back({{1.0, 0.0, 0.0}, Vec3::UnitY()});  // 1 mm away: kept
  const LineMap map(pts, 0.5);
  CHECK(map.size() == 2);
  for (size_t i = 0; i < map.size(); ++i)
    for (size_t j = i + 1; j < map.size(); ++j)
      CHECK((map.points()[i].position - map.points()[j].position).norm() >= 0.5);
}

TEST_CASE("linemap PLY round trip preserves line directions") {
  std::vector<OrientedPoint> pts;
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 40; ++i)
    pts.push_back({{u(gen), u(gen), u(gen)}, Vec3(u(gen), u(gen), u(gen)).normalized()});
  const LineMap map(pts, 0.5);

  TempFile file(".ply");
  save_linemap_ply(file.str(), map);
  const LineMap loaded = load_linemap_ply(file.str());
  REQUIRE(loaded.size() == map.size());
  for (size_t i = 0; i < map.size(); ++i) {
    CHECK((loaded.points()[i].position - map.points()[i].position).norm() < 1e-4);
    const Vec3 a = map.points()[i].direction, b = loaded.points()[i].direction;
    CHECK(std::min((a - b).norm(), (a + b).norm()) < 1e-4);
  }
}

TEST_CASE("scalp round trip keeps mesh and root sites") {
  ScalpModel scalp;
  scalp.vertices = {{0.0, 0.0, 90.0}, {10.0, 0.0, 89.0}, {0.0, 10.0, 89.0}};
  scalp.faces = {{0, 1, 2}};
  scalp.root_sites = {{3.0, 3.0, 89.3}};

  TempFile file(".ply");
  save_scalp(file.str(), scalp);
  const ScalpModel loaded = load_scalp(file.str());
  REQUIRE(loaded.vertices.size() == 3);
  REQUIRE(loaded.faces.size() == 1);
  REQUIRE(loaded.root_sites.size() == 1);
  CHECK((loaded.root_sites[0] - scalp.root_sites[0]).norm() < 1e-4);
}

TEST_CASE("kd-tree agrees with brute force on knn and radius queries") {
  std::mt19937 gen(21);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  std::vector<Vec3> pts(500);
  for (auto& p : pts) p = {u(gen), u(gen), u(gen)};
  const KdTree3 tree(pts);

  for (int q = 0; q < 20; ++q) {
    const Vec3 query(u(gen), u(gen), u(gen));

    auto brute = pts;
    std::vector<int> order(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return (pts[a] - query).squaredNorm() < (pts[b] - query).squaredNorm();
    });

    const auto knn = tree.knn(query, 12);
    REQUIRE(knn.size() == 12);
    for (int i = 0; i < 12; ++i)
      CHECK((pts[knn[i]] - query).norm() == doctest::Approx((pts[order[i]] - query).norm()));

    const double radius = 35.0;
    auto in_radius = tree.radius(query, radius);
    size_t expected = 0;
    for (const auto& p : pts)
      if ((p - query).norm() <= radius) ++expected;
    CHECK(in_radius.size() == expected);

    double sq = 0.0;
    const int nearest = tree.nearest(query, &sq);
    CHECK(nearest == order[0]);
    CHECK(std::sqrt(sq) == doctest::Approx((pts[order[0]] - query).norm()));
  }
}

TEST_CASE("grid accessors: occupancy flips and unit directions") {
  GridSpec spec;
  spec.dims = {16, 16, 16};
  spec.voxel_size = 2.0;
  spec.origin = Vec3::Zero();
  OrientationGrid grid(spec);
  CHECK_FALSE(grid.occupied(3, 3, 3));
  grid.set(3, 3, 3, Vec3f(3.0f, 0.0f, 0.0f));  // stored normalized
  REQUIRE(grid.occupied(3, 3, 3));
  CHECK(grid.direction(3, 3, 3).norm() == doctest::Approx(1.0));
  CHECK(grid.occupied_count() == 1);

  // world<->voxel mapping
  const Vec3 center = grid.voxel_center(3, 3, 3);
  CHECK((center - (spec.origin + 2.0 * Vec3(3.0, 3.0, 3.0))).norm() < 1e-12);
}
