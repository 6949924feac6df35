// Serial-vs-OpenMP comparison for every parallel kernel. Each pair shares
// one lazily built fixture so the numbers are directly comparable.

#include <benchmark/benchmark.h>

#include <random>

#include "hairrec/core/camera.hpp"
#include "hairrec/interior/interior.hpp"
#include "hairrec/mvs/visibility.hpp"
#include "hairrec/orient2d/gabor.hpp"
#include "hairrec/pmvo/pmvo.hpp"
#include "hairrec/strandgen/strandgen.hpp"
#include "hairrec/strandmap/strandmap.hpp"
#include "hairrec/synth/synth.hpp"

namespace {

using namespace hairrec;

std::vector<Vec3> random_cloud(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  std::vector<Vec3> pts(n);
  for (Vec3& p : pts) p = Vec3(u(gen), u(gen), u(gen));
  return pts;
}

const std::vector<Vec3>& depth_cloud() {
  static const std::vector<Vec3> cloud = random_cloud(50000, 7);
  return cloud;
}

CameraView bench_view(int w = 960, int h = 540) {
  return make_lookat_camera(Vec3(0, -600, 0), Vec3::Zero(), Vec3::UnitZ(), 700.0, 700.0, w, h);
}

void BM_RenderDepth(benchmark::State& state) {
  const auto view = bench_view();
  for (auto _ : state) benchmark::DoNotOptimize(mvs::render_depth(view, depth_cloud()));
}
void BM_RenderDepthSerial(benchmark::State& state) {
  const auto view = bench_view();
  for (auto _ : state) benchmark::DoNotOptimize(mvs::render_depth_serial(view, depth_cloud()));
}
BENCHMARK(BM_RenderDepth)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenderDepthSerial)->Unit(benchmark::kMillisecond);

struct GaborFixture {
  Image gray{256, 256, 1};
  Image mask;
  orient2d::GaborBank bank = orient2d::GaborBank::build({});
  GaborFixture() {
    for (int y = 0; y < 256; ++y)
      for (int x = 0; x < 256; ++x)
        gray.at(x, y, 0) = 0.5f + 0.5f * std::sin(0.25 * 2.0 * kPi * (0.6 * x + 0.8 * y));
  }
};
const GaborFixture& gabor_fixture() {
  static const GaborFixture f;
  return f;
}

void BM_Gabor(benchmark::State& state) {
  const auto& f = gabor_fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(orient2d::extract_orientation(f.gray, f.bank, f.mask));
}
void BM_GaborSerial(benchmark::State& state) {
  const auto& f = gabor_fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(orient2d::extract_orientation_serial(f.gray, f.bank, f.mask));
}
BENCHMARK(BM_Gabor)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaborSerial)->Unit(benchmark::kMillisecond);

struct PmvoFixture {
  std::vector<Vec3> points;
  std::vector<pmvo::ViewData> data;
  pmvo::PmvoConfig cfg;
  PmvoFixture() {
    synth::HairstyleConfig hc;
    hc.strand_count = 10;
    hc.strand_vertices = 40;
    const auto style = synth::gen_hairstyle(hc);
    for (const Strand& s : style.strands.strands)
      for (const Vec3& v : s.vertices) points.push_back(v);
    const auto rig = synth::ring_rig(Vec3(0, 0, 40), 600.0, 400.0, 480, 270, 8, {{15.0, 45.0}});
    for (const auto& view : rig) {
      auto maps = synth::render_gt_maps(style.strands, view, 1);
      data.push_back({view, std::move(maps.orient), std::move(maps.conf),
                      mvs::render_depth(view, points)});
    }
  }
};
const PmvoFixture& pmvo_fixture() {
  static const PmvoFixture f;
  return f;
}

void BM_Pmvo(benchmark::State& state) {
  const auto& f = pmvo_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(pmvo::optimize_all(f.points, f.data, f.cfg));
}
void BM_PmvoSerial(benchmark::State& state) {
  const auto& f = pmvo_fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(pmvo::optimize_all_serial(f.points, f.data, f.cfg));
}
BENCHMARK(BM_Pmvo)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PmvoSerial)->Unit(benchmark::kMillisecond);

const LineMap& refine_map() {
  static const LineMap map = [] {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<OrientedPoint> pts(20000);
    for (OrientedPoint& p : pts) {
      p.position = Vec3(u(gen), u(gen), u(gen)) * 80.0;
      p.direction = Vec3(u(gen), u(gen), u(gen)).normalized();
    }
    return LineMap(std::move(pts), 0.0);
  }();
  return map;
}

void BM_Refine(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(pmvo::refine_lines(refine_map(), {}));
}
void BM_RefineSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(pmvo::refine_lines_serial(refine_map(), {}));
}
BENCHMARK(BM_Refine)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RefineSerial)->Unit(benchmark::kMillisecond);

void BM_StrandMaps(benchmark::State& state) {
  const auto rig = strandmap::fixed_view_rig(Vec3::Zero(), 600.0, 400.0, 640, 360);
  for (auto _ : state)
    benchmark::DoNotOptimize(strandmap::render_strand_maps(refine_map(), rig));
}
void BM_StrandMapsSerial(benchmark::State& state) {
  const auto rig = strandmap::fixed_view_rig(Vec3::Zero(), 600.0, 400.0, 640, 360);
  for (auto _ : state)
    benchmark::DoNotOptimize(strandmap::render_strand_maps_serial(refine_map(), rig));
}
BENCHMARK(BM_StrandMaps)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StrandMapsSerial)->Unit(benchmark::kMillisecond);

struct InteriorFixture {
  LineMap map;
  ScalpModel scalp;
  GridSpec spec;
  InteriorFixture() {
    synth::HairstyleConfig hc;
    hc.strand_count = 40;
    const auto style = synth::gen_hairstyle(hc);
    std::vector<OrientedPoint> pts;
    for (const Strand& s : style.strands.strands)
      for (std::size_t v = 0; v + 1 < s.vertices.size(); ++v)
        pts.push_back({s.vertices[v], (s.vertices[v + 1] - s.vertices[v]).normalized()});
    map = LineMap(std::move(pts), 0.5);
    scalp = style.scalp;
    Vec3 lo = map.points().front().position, hi = lo;
    for (const OrientedPoint& p : map.points()) {
      lo = lo.cwiseMin(p.position);
      hi = hi.cwiseMax(p.position);
    }
    for (const Vec3& v : scalp.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    spec.voxel_size = 4.0;
    spec.origin = lo - 6 * spec.voxel_size * Vec3::Ones();
    const Vec3 ext = (hi - spec.origin) / spec.voxel_size;
    spec.dims = Eigen::Vector3i(int(std::ceil(ext.x())) + 7, int(std::ceil(ext.y())) + 7,
                                int(std::ceil(ext.z())) + 7);
  }
};
const InteriorFixture& interior_fixture() {
  static const InteriorFixture f;
  return f;
}

void BM_Interior(benchmark::State& state) {
  const auto& f = interior_fixture();
  interior::InteriorConfig cfg;
  cfg.max_open_fraction = 1.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(interior::complete_interior(f.map, f.scalp, f.spec, cfg));
}
void BM_InteriorSerial(benchmark::State& state) {
  const auto& f = interior_fixture();
  interior::InteriorConfig cfg;
  cfg.max_open_fraction = 1.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(interior::complete_interior_serial(f.map, f.scalp, f.spec, cfg));
}
BENCHMARK(BM_Interior)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InteriorSerial)->Unit(benchmark::kMillisecond);

struct TraceFixture {
  OrientationGrid grid{GridSpec{{64, 64, 16}, Vec3(-32, -32, -8), 1.0}};
  std::vector<Eigen::Vector3i> seeds;
  TraceFixture() {
    for (int k = 0; k < 16; ++k)
      for (int j = 0; j < 64; ++j)
        for (int i = 0; i < 64; ++i) {
          const Vec3 c = grid.voxel_center(i, j, k);
          const double r = std::hypot(c.x(), c.y());
          if (r < 8.0 || r > 28.0) continue;
          grid.set(i, j, k, Vec3f(-c.y() / r, c.x() / r, 0.0f));
        }
    seeds = strandgen::stratified_seeds(grid, 4);
  }
};
const TraceFixture& trace_fixture() {
  static const TraceFixture f;
  return f;
}

void BM_Trace(benchmark::State& state) {
  const auto& f = trace_fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(strandgen::trace_segments(f.grid, f.seeds, 0.5, 2000));
}
void BM_TraceSerial(benchmark::State& state) {
  const auto& f = trace_fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(strandgen::trace_segments_serial(f.grid, f.seeds, 0.5, 2000));
}
BENCHMARK(BM_Trace)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TraceSerial)->Unit(benchmark::kMillisecond);

struct EvalFixture {
  synth::EvalPoints pred, gt;
  std::vector<synth::EvalThreshold> thresholds = synth::default_thresholds();
  EvalFixture() {
    synth::HairstyleConfig hc;
    hc.strand_count = 60;
    const auto style = synth::gen_hairstyle(hc);
    gt = synth::resample_for_eval(style.strands);
    hc.seed = 2;
    pred = synth::resample_for_eval(synth::gen_hairstyle(hc).strands);
  }
};
const EvalFixture& eval_fixture() {
  static const EvalFixture f;
  return f;
}

void BM_Evaluate(benchmark::State& state) {
  const auto& f = eval_fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(synth::evaluate(f.pred, f.gt, f.thresholds));
}
void BM_EvaluateSerial(benchmark::State& state) {
  const auto& f = eval_fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(synth::evaluate_serial(f.pred, f.gt, f.thresholds));
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
