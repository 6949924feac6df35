#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hairrec/core/errors.hpp"
#include "hairrec/core/types.hpp"
#include "hairrec/strandmap/strandmap.hpp"
#include "hairrec/synth/synth.hpp"
#include "helpers.hpp"

using namespace hairrec;
using strandmap::decode_undirectional;
using strandmap::encode_undirectional;
using strandmap::StrandMap;

TEST_CASE("encode_undirectional: axis examples and pi-periodicity") {
  CHECK((encode_undirectional(0.0) - Vec2(1.0, 0.0)).norm() < 1e-12);
  CHECK((encode_undirectional(deg2rad(90.0)) - Vec2(-1.0, 0.0)).norm() < 1e-12);
  CHECK((encode_undirectional(deg2rad(45.0)) - Vec2(0.0, 1.0)).norm() < 1e-12);
  // 225 degrees is the same undirected orientation as 45 degrees.
  CHECK((encode_undirectional(deg2rad(225.0)) - Vec2(0.0, 1.0)).norm() < 1e-12);

  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(gen);
    CHECK((encode_undirectional(a) - encode_undirectional(a + kPi)).norm() < 1e-9);
    CHECK(encode_undirectional(a).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("decode(encode(O)) returns O mod pi to 1e-5 and lands in [0, pi)") {
  std::mt19937 gen(13);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = i < 5000 ? i * kPi / 5000.0 : u(gen);
    const double back = decode_undirectional(encode_undirectional(a));
    CHECK(back >= 0.0);
    CHECK(back < kPi);
    CHECK(test::orientation_diff(a, back) < 1e-5);
  }
}

TEST_CASE("StrandMap: masked pixels store unit encodings, empty pixels are unmasked") {
  StrandMap map(32, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 32; ++x) CHECK_FALSE(map.masked(x, y));

  std::mt19937 gen(17);
  std::uniform_real_distribution<double> u(0.001, kPi - 0.001);
  for (int k = 0; k < 100; ++k) {
    const int x = k % 32, y = (k * 7) % 16;
    map.set(x, y, u(gen));
    CHECK(map.masked(x, y));
    CHECK(map.encoded(x, y).norm() == doctest::Approx(1.0).epsilon(1e-4));
  }

  // The raster-wrapping constructor insists on exactly two channels.
  CHECK_THROWS_AS(StrandMap(Image(8, 8, 3)), ValidationError);
}

TEST_CASE("fixed_view_rig: 16 cameras, ring of 12 at 0 deg plus 4 at 35 deg, aimed at center") {
  const Vec3 center(12.0, -40.0, 95.0);
  const auto rig = strandmap::fixed_view_rig(center);
  REQUIRE(rig.size() == 16);

  for (size_t i = 0; i < rig.size(); ++i) {
    const CameraView& v = rig[i];
    CHECK(v.width == 1280);
    CHECK(v.height == 720);
    CHECK(v.fx == doctest::Approx(800.0));

    const Vec3 offset = v.center() - center;
    CHECK(offset.norm() == doctest::Approx(600.0).epsilon(1e-9));

    // Aimed at the center: the center projects onto the principal point.
    const auto proj = v.project(center);
    REQUIRE(proj.has_value());
    CHECK(proj->uv.x() == doctest::Approx(v.cx).epsilon(1e-6));
    CHECK(proj->uv.y() == doctest::Approx(v.cy).epsilon(1e-6));
    CHECK(proj->depth == doctest::Approx(600.0).epsilon(1e-9));

    const double elevation = rad2deg(std::asin(offset.z() / 600.0));
    const double azimuth = rad2deg(std::atan2(offset.y(), offset.x()));
    if (i < 12) {
      CHECK(elevation == doctest::Approx(0.0).epsilon(1e-9));
      CHECK(test::orientation_diff(deg2rad(azimuth), deg2rad(30.0 * i)) < 1e-9);
    } else {
      CHECK(elevation == doctest::Approx(35.0).epsilon(1e-9));
      CHECK(test::orientation_diff(deg2rad(azimuth), deg2rad(90.0 * (i - 12))) < 1e-9);
    }
  }

  CHECK_THROWS_AS(strandmap::fixed_view_rig(center, -1.0), ValidationError);
  CHECK_THROWS_AS(strandmap::fixed_view_rig(center, 600.0, 0.0), ValidationError);
}

TEST_CASE("render_strand_map: a line along world x maps to (1,0) pixels at its depth") {
  const CameraView view = test::axis_camera(500.0, 500.0, 64.0, 64.0, 128, 128);
  std::vector<OrientedPoint> pts;
  for (int i = -10; i <= 10; ++i) pts.push_back({{2.0 * i, 0.0, 500.0}, Vec3::UnitX()});
  const LineMap map(pts, 0.5);

  const auto render = strandmap::render_strand_map(map, view);
  int masked = 0;
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x) {
      if (!render.map.masked(x, y)) {
        CHECK_FALSE(render.depth.has_geometry(x, y));
        continue;
      }
      ++masked;
      CHECK((render.map.encoded(x, y) - Vec2(1.0, 0.0)).norm() < 1e-9);
      CHECK(render.depth.depth(x, y) == doctest::Approx(500.0).epsilon(1e-9));
      CHECK(y == 64);  // the line is horizontal through the principal point
    }
  CHECK(masked > 20);

  CHECK_THROWS_AS(strandmap::render_strand_map(map, view, 0.0), ValidationError);
}

TEST_CASE("render_strand_map: flipping any subset of direction signs is bit-identical") {
  const CameraView view = test::axis_camera(500.0, 500.0, 64.0, 64.0, 128, 128);
  std::mt19937 gen(23);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);

  std::vector<OrientedPoint> pts;
  for (int i = 0; i < 200; ++i) {
    const Vec3 d = Vec3(n(gen), n(gen), n(gen)).normalized();
    pts.push_back({{u(gen), u(gen), 500.0 + u(gen)}, d});
  }
  auto all_flipped = pts;
  for (auto& p : all_flipped) p.direction = -p.direction;
  auto some_flipped = pts;
  for (auto& p : some_flipped)
    if (coin(gen)) p.direction = -p.direction;

  const auto base = strandmap::render_strand_map(LineMap(pts, 0.0), view);
  for (const auto& variant : {all_flipped, some_flipped}) {
    const auto other = strandmap::render_strand_map(LineMap(variant, 0.0), view);
    CHECK(base.map.raster().data() == other.map.raster().data());
    CHECK(base.depth.raster().data() == other.depth.raster().data());
  }
}

TEST_CASE("render_strand_map: nearest depth wins where two lines overlap") {
  const CameraView view = test::axis_camera(500.0, 500.0, 32.0, 32.0, 64, 64);
  // Both points project to the principal pixel; the y-direction line is 20mm
  // nearer and must own the contested pixel.
  std::vector<OrientedPoint> pts = {{{0.0, 0.0, 500.0}, Vec3::UnitX()},
                                    {{0.0, 0.0, 480.0}, Vec3::UnitY()}};
  for (int order = 0; order < 2; ++order) {
    auto arranged = pts;
    if (order == 1) std::swap(arranged[0], arranged[1]);
    const auto render = strandmap::render_strand_map(LineMap(arranged, 0.0), view);
    REQUIRE(render.map.masked(32, 32));
    CHECK(render.depth.depth(32, 32) == doctest::Approx(480.0).epsilon(1e-9));
    CHECK((render.map.encoded(32, 32) - Vec2(-1.0, 0.0)).norm() < 1e-9);
  }
}

namespace {

// Fraction of judged pixels whose rendered orientation matches the analytic
// projection of the judging point's tangent within `tol_deg`. Pixels are
// judged only when the point plausibly won them in the depth test.
double projected_orientation_agreement(const StrandSet& strands, double tol_deg,
                                       long* compared_out) {
  std::vector<OrientedPoint> pts;
  Vec3 lo = Vec3::Constant(1e300), hi = -lo;
  for (const auto& s : strands.strands)
    for (size_t v = 0; v + 1 < s.vertices.size(); ++v) {
      pts.push_back({s.vertices[v], (s.vertices[v + 1] - s.vertices[v]).normalized()});
      lo = lo.cwiseMin(s.vertices[v]);
      hi = hi.cwiseMax(s.vertices[v]);
    }
  const LineMap map(pts, 0.5);
  const auto rig = strandmap::fixed_view_rig(0.5 * (lo + hi));

  long compared = 0, good = 0;
  for (size_t vi = 0; vi < rig.size(); vi += 3) {
    const CameraView& view = rig[vi];
    const auto render = strandmap::render_strand_map(map, view);
    for (const auto& op : map.points()) {
      const auto proj = view.project(op.position);
      if (!proj) continue;
      const int x = static_cast<int>(std::lround(proj->uv.x()));
      const int y = static_cast<int>(std::lround(proj->uv.y()));
      if (x < 0 || y < 0 || x >= view.width || y >= view.height) continue;
      if (!render.map.masked(x, y)) continue;
      if (std::abs(render.depth.depth(x, y) - proj->depth) > 0.5) continue;

      const auto probe = view.project(op.position + 0.01 * op.direction);
      if (!probe) continue;
      const Vec2 d2 = probe->uv - proj->uv;
      if (d2.norm() < 1e-9) continue;
      ++compared;
      const double analytic = std::atan2(d2.y(), d2.x());
      if (rad2deg(test::orientation_diff(analytic, render.map.angle(x, y))) < tol_deg) ++good;
    }
  }
  if (compared_out) *compared_out = compared;
  return compared > 0 ? static_cast<double>(good) / compared : 0.0;
}

}  // namespace

TEST_CASE("rendered synthetic line map matches analytic projected orientation at 98% of pixels") {
  // Straight strands: a straight 3D line projects to a straight 2D line, so
  // every chord rasterized from any point of a strand carries the same image
  // orientation and contested pixels between neighbors agree.
  synth::HairstyleConfig hc;
  hc.style = synth::Style::kStraight;
  hc.strand_count = 20;
  hc.seed = 6;
  long compared = 0;
  const double agree =
      projected_orientation_agreement(synth::gen_hairstyle(hc).strands, 2.0, &compared);
  REQUIRE(compared > 1000);
  CHECK(agree >= 0.98);
}

TEST_CASE("wavy line maps stay mostly faithful despite contested chord pixels") {
  // Curved strands rasterize overlapping 4mm chords whose tangents differ by
  // a few degrees between neighboring points, so a pixel may legitimately
  // hold a neighbor's angle; agreement drops but must stay high.
  synth::HairstyleConfig hc;
  hc.strand_count = 20;
  hc.seed = 6;
  long compared = 0;
  const double agree =
      projected_orientation_agreement(synth::gen_hairstyle(hc).strands, 2.0, &compared);
  REQUIRE(compared > 1000);
  CHECK(agree >= 0.75);
}

TEST_CASE("render_strand_maps parallel output equals the serial reference bit for bit") {
  std::mt19937 gen(29);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<OrientedPoint> pts;
  for (int i = 0; i < 300; ++i)
    pts.push_back({{u(gen), u(gen), u(gen)}, Vec3(n(gen), n(gen), n(gen)).normalized()});
  const LineMap map(pts, 0.0);
  const auto rig = strandmap::fixed_view_rig(Vec3::Zero(), 600.0, 400.0, 320, 180);

  const auto par = strandmap::render_strand_maps(map, rig);
  const auto ser = strandmap::render_strand_maps_serial(map, rig);
  REQUIRE(par.size() == ser.size());
  for (size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].map.raster().data() == ser[i].map.raster().data());
    CHECK(par[i].depth.raster().data() == ser[i].depth.raster().data());
  }
}
