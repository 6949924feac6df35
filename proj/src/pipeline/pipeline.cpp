#include "hairrec/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <vector>

#include "hairrec/core/errors.hpp"
#include "hairrec/core/io.hpp"
#include "hairrec/core/parallel.hpp"
#include "hairrec/interior/interior.hpp"
#include "hairrec/mvs/visibility.hpp"
#include "hairrec/orient2d/gabor.hpp"
#include "hairrec/pmvo/pmvo.hpp"
#include "hairrec/strandgen/strandgen.hpp"
#include "hairrec/strandmap/strandmap.hpp"
#include "hairrec/synth/synth.hpp"

namespace hairrec::pipeline {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json section(const json& cfg, const char* name) {
  return cfg.contains(name) ? cfg.at(name) : json::object();
}

fs::path view_file(const fs::path& dir, const char* prefix, int i) {
  char name[64];
  std::snprintf(name, sizeof(name), "%s%03d.hrrf", prefix, i);
  return dir / name;
}

bool all_exist(const std::vector<fs::path>& paths) {
  return std::all_of(paths.begin(), paths.end(), [](const fs::path& p) { return fs::exists(p); });
}

template <typename Fn>
void run_stage(json& stages, const std::string& name, const std::vector<fs::path>& outputs,
               bool force, Fn&& fn) {
  json entry{{"name", name}};
  if (!force && !outputs.empty() && all_exist(outputs)) {
    entry["skipped"] = true;
    stages.push_back(std::move(entry));
    return;
  }
  for (const fs::path& p : outputs)
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const auto t0 = std::chrono::steady_clock::now();
  try {
    entry["counts"] = fn();
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
  entry["skipped"] = false;
  entry["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  stages.push_back(std::move(entry));
}

struct Bounds {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
  Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());
  void add(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bool valid() const { return (hi - lo).minCoeff() >= 0.0; }
};

synth::HairstyleConfig hairstyle_from(const json& s) {
  synth::HairstyleConfig hc;
  hc.style = synth::style_from_string(s.value("style", "wavy"));
  hc.strand_count = s.value("strand_count", 50);
  hc.seed = s.value("seed", 1u);
  hc.step = s.value("step", hc.step);
  hc.strand_vertices = s.value("strand_vertices", hc.strand_vertices);
  hc.wave_amplitude = s.value("wave_amplitude", hc.wave_amplitude);
  hc.wave_period = s.value("wave_period", hc.wave_period);
  hc.helix_radius = s.value("helix_radius", hc.helix_radius);
  hc.helix_pitch = s.value("helix_pitch", hc.helix_pitch);
  return hc;
}

pmvo::PmvoConfig pmvo_from(const json& s) {
  pmvo::PmvoConfig pc;
  pc.patch_size = s.value("patch_size", pc.patch_size);
  pc.keep_threshold = s.value("keep_threshold", pc.keep_threshold);
  pc.neighbor_count = s.value("neighbor_count", pc.neighbor_count);
  pc.refine_threshold = s.value("refine_threshold", pc.refine_threshold);
  pc.reference_frames = s.value("reference_frames", pc.reference_frames);
  pc.tau = s.value("tau", pc.tau);
  pc.angular_samples = s.value("angular_samples", pc.angular_samples);
  pc.angle_resolution_deg = s.value("angle_resolution_deg", pc.angle_resolution_deg);
  pc.confidence_floor = s.value("confidence_floor", pc.confidence_floor);
  pc.direction_probe = s.value("direction_probe", pc.direction_probe);
  pc.min_spacing = s.value("min_spacing", pc.min_spacing);
  pc.validate();
  return pc;
}

std::vector<synth::EvalThreshold> thresholds_from(const json& cfg) {
  const json e = section(cfg, "eval");
  if (!e.contains("thresholds")) return synth::default_thresholds();
  std::vector<synth::EvalThreshold> ts;
  for (const json& t : e.at("thresholds")) {
    if (!t.is_array() || t.size() != 2) throw ValidationError("eval threshold must be [mm, deg]");
    const synth::EvalThreshold th{t[0].get<double>(), t[1].get<double>()};
    if (th.distance_mm <= 0.0 || th.angle_deg <= 0.0)
      throw ValidationError("eval thresholds must be positive");
    ts.push_back(th);
  }
  if (ts.empty()) throw ValidationError("eval threshold list is empty");
  return ts;
}

}  // namespace

json demo_config() {
  return json{
      {"out_dir", "out"},
      {"threads", 0},
      {"synth",
       {{"style", "wavy"},
        {"strand_count", 50},
        {"seed", 1},
        {"views", 24},
        {"image_width", 960},
        {"image_height", 540},
        {"focal", 1400.0},
        {"rig_radius", 600.0},
        {"rig_elevations", {15.0, 45.0}},
        {"noise_fraction", 0.3},
        {"noise_margin", 20.0},
        {"thickness", 1}}},
      {"depth", {{"splat_radius", 1}}},
      {"pmvo",
       {{"patch_size", 5},
        {"keep_threshold", 0.05},
        {"neighbor_count", 100},
        {"refine_threshold", 0.015},
        {"reference_frames", 10},
        {"tau", 5.0},
        {"angular_samples", 64},
        {"min_spacing", 0.5}}},
      {"strandmaps",
       {{"enabled", true},
        {"views", 16},
        {"width", 640},
        {"height", 360},
        {"focal", 400.0},
        {"radius", 600.0},
        {"grow", 2.0}}},
      {"interior",
       {{"voxel_size", 3.0},
        {"closing_radius", 4},
        {"diffusion_sweeps", 30},
        {"max_open_fraction", 0.4}}},
      {"grow",
       {{"step", 0.0},
        {"seed_stride", 2},
        {"max_steps", 10000},
        {"use_visibility", true},
        {"chain_gap", 3.0},
        {"chain_angle_deg", 30.0},
        {"root_distance", 15.0},
        {"attach_distance", 5.0},
        {"graft_distance", 2.0}}},
      {"eval", {{"thresholds", {{2.0, 20.0}, {3.0, 30.0}, {4.0, 40.0}}}}},
  };
}

json synth_scene(const json& s, const fs::path& scene) {
  fs::create_directories(scene);
  const int n_views = s.value("views", 24);
  const auto style = synth::gen_hairstyle(hairstyle_from(s));

  Bounds b;
  for (const Strand& st : style.strands.strands)
    for (const Vec3& v : st.vertices) b.add(v);
  const Vec3 center = 0.5 * (b.lo + b.hi);

  std::vector<double> elevations{15.0, 45.0};
  if (s.contains("rig_elevations")) {
    elevations.clear();
    for (const json& e : s.at("rig_elevations")) elevations.push_back(e.get<double>());
  }
  const auto rig =
      synth::ring_rig(center, s.value("rig_radius", 600.0), s.value("focal", 700.0),
                      s.value("image_width", 960), s.value("image_height", 540), n_views,
                      elevations);
  save_cameras((scene / "cameras.txt").string(), rig);

  const int thickness = s.value("thickness", 1);
  for (int i = 0; i < n_views; ++i) {
    const auto maps = synth::render_gt_maps(style.strands, rig[i], thickness);
    save_raster(view_file(scene, "orient_", i).string(), maps.orient.raster());
    save_raster(view_file(scene, "conf_", i).string(), maps.conf.raster());
  }

  PointCloud cloud;
  for (const Strand& st : style.strands.strands) {
    for (std::size_t v = 0; v < st.vertices.size(); ++v) {
      cloud.points.push_back(st.vertices[v]);
      const std::size_t e = v + 1 < st.vertices.size() ? v : v - 1;
      cloud.directions.push_back((st.vertices[e + 1] - st.vertices[e]).normalized());
    }
  }
  const std::size_t n_true = cloud.points.size();
  const double margin = s.value("noise_margin", 20.0);
  cloud = synth::inject_noise(cloud, s.value("noise_fraction", 0.3),
                              b.lo - Vec3::Constant(margin), b.hi + Vec3::Constant(margin),
                              s.value("seed", 1u) + 1);
  save_ply((scene / "cloud.ply").string(), cloud);
  save_scalp((scene / "scalp.ply").string(), style.scalp);
  save_strands((scene / "gt_strands.bin").string(), style.strands);
  return json{{"strands", style.strands.size()},
              {"true_points", n_true},
              {"cloud_points", cloud.points.size()},
              {"views", n_views}};
}

RunReport run_pipeline(const json& config, const fs::path& base_dir, bool force, int threads) {
  if (!config.is_object()) throw ValidationError("config must be a JSON object");

  fs::path out = fs::path(config.value("out_dir", std::string("out")));
  if (out.is_relative()) out = base_dir / out;

  const bool have_synth = config.contains("synth");
  const json inputs = section(config, "inputs");

  const fs::path scene = out / "scene";
  fs::path cameras_path, cloud_path, scalp_path, gt_path, orient_dir, conf_dir;
  bool need_extract = false;

  auto input_path = [&](const char* key) {
    fs::path p = fs::path(inputs.at(key).get<std::string>());
    return p.is_relative() ? base_dir / p : p;
  };

  if (have_synth) {
    cameras_path = scene / "cameras.txt";
    cloud_path = scene / "cloud.ply";
    scalp_path = scene / "scalp.ply";
    gt_path = scene / "gt_strands.bin";
    orient_dir = conf_dir = scene;
  } else {
    for (const char* key : {"cameras", "cloud", "scalp"}) {
      if (!inputs.contains(key))
        throw ValidationError(std::string("config inputs missing '") + key + "'");
      if (!fs::exists(input_path(key)))
        throw ValidationError(std::string("input file not found: ") + input_path(key).string());
    }
    cameras_path = input_path("cameras");
    cloud_path = input_path("cloud");
    scalp_path = input_path("scalp");
    if (inputs.contains("gt_strands")) {
      gt_path = input_path("gt_strands");
      if (!fs::exists(gt_path))
        throw ValidationError("ground-truth strand file not found: " + gt_path.string());
    }
    if (inputs.contains("orient_dir") && inputs.contains("conf_dir")) {
      orient_dir = input_path("orient_dir");
      conf_dir = input_path("conf_dir");
      for (const fs::path& d : {orient_dir, conf_dir})
        if (!fs::is_directory(d))
          throw ValidationError("map directory not found: " + d.string());
    } else if (inputs.contains("images_dir")) {
      if (!fs::is_directory(input_path("images_dir")))
        throw ValidationError("image directory not found: " + input_path("images_dir").string());
      need_extract = true;
      orient_dir = conf_dir = out / "maps";
    } else {
      throw ValidationError("config inputs need orient_dir/conf_dir or images_dir");
    }
  }

  const auto thresholds = thresholds_from(config);

  const int use_threads = threads > 0 ? threads : config.value("threads", 0);
  if (use_threads > 0) set_threads(use_threads);

  fs::create_directories(out);
  json stages = json::array();

  // --- synthesize the scene -------------------------------------------------
  int n_views = 0;
  if (have_synth) {
    const json s = section(config, "synth");
    n_views = s.value("views", 24);
    std::vector<fs::path> outputs{cameras_path, cloud_path, scalp_path, gt_path};
    for (int i = 0; i < n_views; ++i) {
      outputs.push_back(view_file(scene, "orient_", i));
      outputs.push_back(view_file(scene, "conf_", i));
    }
    run_stage(stages, "synth", outputs, force, [&]() { return synth_scene(s, scene); });
  }

  const auto views = load_cameras(cameras_path.string());
  n_views = static_cast<int>(views.size());

  // --- 2d orientation extraction --------------------------------------------
  if (need_extract) {
    const json g = section(config, "gabor");
    std::vector<fs::path> outputs;
    for (int i = 0; i < n_views; ++i) {
      outputs.push_back(view_file(orient_dir, "orient_", i));
      outputs.push_back(view_file(conf_dir, "conf_", i));
    }
    run_stage(stages, "extract-orient", outputs, force, [&]() {
      orient2d::GaborBankConfig bc;
      bc.n_orientations = g.value("orientations", bc.n_orientations);
      bc.sigma_x = g.value("sigma_x", bc.sigma_x);
      bc.sigma_y = g.value("sigma_y", bc.sigma_y);
      bc.frequency = g.value("frequency", bc.frequency);
      bc.kernel_size = g.value("kernel_size", bc.kernel_size);
      const auto bank = orient2d::GaborBank::build(bc);
      const std::string pattern = inputs.value("image_pattern", std::string("view_%03d.pgm"));
      const std::string mask_pattern = inputs.value("mask_pattern", std::string(""));
      const fs::path images = input_path("images_dir");
      for (int i = 0; i < n_views; ++i) {
        char name[128];
        std::snprintf(name, sizeof(name), pattern.c_str(), i);
        const Image img = load_image_any((images / name).string());
        Image mask;
        if (!mask_pattern.empty()) {
          std::snprintf(name, sizeof(name), mask_pattern.c_str(), i);
          mask = load_image_any((images / name).string());
        }
        const auto [orient, conf] = orient2d::extract_orientation(img, bank, mask);
        save_raster(view_file(orient_dir, "orient_", i).string(), orient.raster());
        save_raster(view_file(conf_dir, "conf_", i).string(), conf.raster());
      }
      return json{{"views", n_views}};
    });
  }

  // --- depth rendering -------------------------------------------------------
  const fs::path depth_dir = out / "depth";
  {
    std::vector<fs::path> outputs;
    for (int i = 0; i < n_views; ++i) outputs.push_back(view_file(depth_dir, "depth_", i));
    run_stage(stages, "render-depth", outputs, force, [&]() {
      const PointCloud cloud = load_ply(cloud_path.string());
      const int splat = section(config, "depth").value("splat_radius", 1);
      for (int i = 0; i < n_views; ++i) {
        const DepthMap d = mvs::render_depth(views[i], cloud.points, splat);
        save_raster(view_file(depth_dir, "depth_", i).string(), d.raster());
      }
      return json{{"views", n_views}, {"points", cloud.points.size()}};
    });
  }

  // --- patch-based multi-view optimization ------------------------------------
  const pmvo::PmvoConfig pc = pmvo_from(section(config, "pmvo"));
  const fs::path linemap_path = out / "pmvo" / "linemap.ply";
  run_stage(stages, "pmvo", {linemap_path}, force, [&]() {
    const PointCloud cloud = load_ply(cloud_path.string());
    std::vector<pmvo::ViewData> data;
    data.reserve(n_views);
    for (int i = 0; i < n_views; ++i) {
      data.push_back({views[i],
                      OrientationMap(load_raster(view_file(orient_dir, "orient_", i).string())),
                      ConfidenceMap(load_raster(view_file(conf_dir, "conf_", i).string())),
                      DepthMap(load_raster(view_file(depth_dir, "depth_", i).string()))});
    }
    const auto estimates = pmvo::optimize_all(cloud.points, data, pc);
    const size_t optimizable =
        std::count_if(estimates.begin(), estimates.end(),
                      [](const pmvo::LineEstimate& e) { return e.optimizable; });
    const LineMap filtered = pmvo::filter_lines(cloud.points, estimates, data, pc);
    const LineMap refined = pmvo::refine_lines(filtered, pc);
    save_linemap_ply(linemap_path.string(), refined);
    return json{{"points", cloud.points.size()},
                {"optimizable", optimizable},
                {"kept", filtered.size()},
                {"final", refined.size()}};
  });

  // --- strand map rendering ----------------------------------------------------
  const json sm = section(config, "strandmaps");
  if (sm.value("enabled", true)) {
    const int sm_views = sm.value("views", 16);
    const fs::path sm_dir = out / "strandmaps";
    std::vector<fs::path> outputs;
    for (int i = 0; i < sm_views; ++i) {
      outputs.push_back(view_file(sm_dir, "strandmap_", i));
      outputs.push_back(view_file(sm_dir, "smdepth_", i));
    }
    run_stage(stages, "render-strandmaps", outputs, force, [&]() {
      const LineMap map = load_linemap_ply(linemap_path.string(), pc.min_spacing);
      Bounds b;
      for (const OrientedPoint& p : map.points()) b.add(p.position);
      if (!b.valid()) throw ValidationError("line map is empty");
      const auto rig = strandmap::fixed_view_rig(
          0.5 * (b.lo + b.hi), sm.value("radius", 600.0), sm.value("focal", 800.0),
          sm.value("width", 1280), sm.value("height", 720));
      const auto picked = std::min<std::size_t>(sm_views, rig.size());
      const auto renders = strandmap::render_strand_maps(
          map, std::span<const CameraView>(rig.data(), picked), sm.value("grow", 2.0));
      for (size_t i = 0; i < renders.size(); ++i) {
        save_raster(view_file(sm_dir, "strandmap_", static_cast<int>(i)).string(),
                    renders[i].map.raster());
        save_raster(view_file(sm_dir, "smdepth_", static_cast<int>(i)).string(),
                    renders[i].depth.raster());
      }
      return json{{"views", renders.size()}, {"points", map.size()}};
    });
  }

  // --- interior completion ------------------------------------------------------
  const json ic = section(config, "interior");
  const double voxel = ic.value("voxel_size", 3.0);
  const fs::path grid_path = out / "interior" / "grid.bin";
  interior::InteriorConfig icfg;
  icfg.closing_radius = ic.value("closing_radius", icfg.closing_radius);
  icfg.diffusion_sweeps = ic.value("diffusion_sweeps", icfg.diffusion_sweeps);
  icfg.max_open_fraction = ic.value("max_open_fraction", icfg.max_open_fraction);
  run_stage(stages, "interior", {grid_path}, force, [&]() {
    if (voxel <= 0.0) throw ValidationError("voxel size must be positive");
    const LineMap map = load_linemap_ply(linemap_path.string(), pc.min_spacing);
    const ScalpModel scalp = load_scalp(scalp_path.string());
    Bounds b;
    for (const OrientedPoint& p : map.points()) b.add(p.position);
    for (const Vec3& v : scalp.vertices) b.add(v);
    if (!b.valid()) throw ValidationError("nothing to voxelize");
    const int pad = ic.value("margin_voxels", icfg.closing_radius + 2);
    GridSpec spec;
    spec.voxel_size = voxel;
    spec.origin = b.lo - pad * voxel * Vec3::Ones();
    const Vec3 extent = (b.hi - spec.origin) / voxel;
    spec.dims = Eigen::Vector3i(static_cast<int>(std::ceil(extent.x())) + 1 + pad,
                                static_cast<int>(std::ceil(extent.y())) + 1 + pad,
                                static_cast<int>(std::ceil(extent.z())) + 1 + pad);
    const auto result = interior::complete_interior(map, scalp, spec, icfg);
    save_grid(grid_path.string(), result.grid);
    return json{{"exterior_voxels", result.exterior_voxels},
                {"interior_voxels", result.interior_voxels},
                {"dims", {spec.dims.x(), spec.dims.y(), spec.dims.z()}}};
  });

  // --- strand growth --------------------------------------------------------------
  const json gr = section(config, "grow");
  const fs::path strands_path = out / "grow" / "strands.bin";
  run_stage(stages, "grow", {strands_path}, force, [&]() {
    const OrientationGrid igrid = load_grid(grid_path.string());
    const LineMap map = load_linemap_ply(linemap_path.string(), pc.min_spacing);
    const ScalpModel scalp = load_scalp(scalp_path.string());

    OrientationGrid merged;
    if (gr.value("use_visibility", true)) {
      std::vector<DepthMap> depths;
      depths.reserve(n_views);
      for (int i = 0; i < n_views; ++i)
        depths.emplace_back(load_raster(view_file(depth_dir, "depth_", i).string()));
      merged = strandgen::merge_geometry(map, igrid, views, depths, pc.tau);
    } else {
      merged = strandgen::merge_geometry(map, igrid);
    }

    const double step = gr.value("step", 0.0) > 0.0 ? gr.value("step", 0.0)
                                                    : merged.voxel_size() / 2.0;
    const auto seeds = strandgen::stratified_seeds(merged, gr.value("seed_stride", 2));
    const StrandSet segments =
        strandgen::trace_segments(merged, seeds, step, gr.value("max_steps", 10000));
    if (segments.empty()) throw ValidationError("tracing produced no segments");

    strandgen::ConnectConfig cc;
    cc.chain_gap = gr.value("chain_gap", cc.chain_gap);
    cc.chain_angle_deg = gr.value("chain_angle_deg", cc.chain_angle_deg);
    cc.root_distance = gr.value("root_distance", cc.root_distance);
    cc.attach_distance = gr.value("attach_distance", cc.attach_distance);
    cc.graft_distance = gr.value("graft_distance", cc.graft_distance);
    cc.bridge_step = gr.value("bridge_step", 0.0) > 0.0 ? gr.value("bridge_step", 0.0) : step;
    const auto connected = strandgen::connect_strands(segments, scalp, cc);

    save_strands(strands_path.string(), connected.strands);
    return json{{"seeds", seeds.size()},
                {"segments", segments.size()},
                {"strands", connected.strands.size()},
                {"rooted", connected.rooted},
                {"attached", connected.attached},
                {"unrooted", connected.unrooted},
                {"vertices", connected.strands.total_vertices()}};
  });

  // --- evaluation -------------------------------------------------------------------
  json eval_report;
  if (!gt_path.empty()) {
    const fs::path report_path = out / "eval" / "report.json";
    run_stage(stages, "eval", {report_path}, force, [&]() {
      const auto pred = synth::resample_for_eval(load_strands(strands_path.string()));
      const auto gt = synth::resample_for_eval(load_strands(gt_path.string()));
      const auto scores = synth::evaluate(pred, gt, thresholds);
      json rows = json::array();
      for (const auto& s : scores) {
        rows.push_back({{"distance_mm", s.threshold.distance_mm},
                        {"angle_deg", s.threshold.angle_deg},
                        {"precision", s.precision},
                        {"recall", s.recall},
                        {"f_score", s.f_score}});
      }
      eval_report = json{{"thresholds", rows}};
      std::ofstream os(report_path);
      os << eval_report.dump(2) << "\n";
      if (!os) throw FileError("cannot write " + report_path.string());
      return eval_report;
    });
    if (eval_report.is_null() && fs::exists(report_path)) {
      std::ifstream is(report_path);
      is >> eval_report;
    }
  }

  json summary{{"stages", stages}, {"out_dir", out.string()}, {"strands", strands_path.string()}};
  if (!eval_report.is_null()) summary["eval"] = eval_report;
  {
    std::ofstream os(out / "summary.json");
    os << summary.dump(2) << "\n";
  }
  return {summary, strands_path};
}

RunReport run_pipeline_file(const fs::path& config_path, bool force, int threads) {
  std::ifstream is(config_path);
  if (!is) throw FileError("cannot open config: " + config_path.string());
  json config;
  try {
    is >> config;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  return run_pipeline(config, config_path.parent_path(), force, threads);
}

}  // namespace hairrec::pipeline
