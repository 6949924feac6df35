// Command-line front end: one subcommand per pipeline stage plus an
// end-to-end `run` driver. Exit codes: 0 success, 1 validation problem,
// 2 stage failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hairrec/core/errors.hpp"
#include "hairrec/core/io.hpp"
#include "hairrec/core/parallel.hpp"
#include "hairrec/interior/interior.hpp"
#include "hairrec/mvs/visibility.hpp"
#include "hairrec/orient2d/gabor.hpp"
#include "hairrec/pipeline/pipeline.hpp"
#include "hairrec/pmvo/pmvo.hpp"
#include "hairrec/strandgen/strandgen.hpp"
#include "hairrec/strandmap/strandmap.hpp"
#include "hairrec/synth/synth.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hairrec;

fs::path view_file(const fs::path& dir, const char* prefix, int i) {
  char name[64];
  std::snprintf(name, sizeof(name), "%s%03d.hrrf", prefix, i);
  return dir / name;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FileError("cannot open " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("JSON parse error in ") + path + ": " + e.what());
  }
  return j;
}

std::vector<synth::EvalThreshold> parse_thresholds(const std::string& text) {
  std::vector<synth::EvalThreshold> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    const std::size_t slash = item.find('/');
    if (slash == std::string::npos)
      throw ValidationError("threshold '" + item + "' is not of the form mm/deg");
    try {
      out.push_back({std::stod(item.substr(0, slash)), std::stod(item.substr(slash + 1))});
    } catch (const std::exception&) {
      throw ValidationError("threshold '" + item + "' is not numeric");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ValidationError("no thresholds given");
  return out;
}

std::vector<DepthMap> load_depths(const fs::path& dir, int n_views) {
  std::vector<DepthMap> depths;
  depths.reserve(n_views);
  for (int i = 0; i < n_views; ++i)
    depths.emplace_back(load_raster(view_file(dir, "depth_", i).string()));
  return depths;
}

int run_main(int argc, char** argv) {
  CLI::App app{"Multi-view hair geometry reconstruction"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (0 = all cores)");

  // --- extract-orient -------------------------------------------------------
  auto* cmd_extract = app.add_subcommand("extract-orient",
                                         "2D orientation + confidence from one image");
  struct {
    std::string image, mask, out_orient, out_conf;
    orient2d::GaborBankConfig bank;
  } ex;
  cmd_extract->add_option("--image", ex.image, "grayscale image (.pgm/.ppm/.hrrf)")->required();
  cmd_extract->add_option("--mask", ex.mask, "hair mask raster (nonzero = hair)");
  cmd_extract->add_option("--out-orient", ex.out_orient, "orientation raster out")->required();
  cmd_extract->add_option("--out-conf", ex.out_conf, "confidence raster out")->required();
  cmd_extract->add_option("--orientations", ex.bank.n_orientations, "filter bank size");
  cmd_extract->add_option("--sigma-x", ex.bank.sigma_x, "gaussian sigma across strands");
  cmd_extract->add_option("--sigma-y", ex.bank.sigma_y, "gaussian sigma along strands");
  cmd_extract->add_option("--frequency", ex.bank.frequency, "carrier frequency, cycles/px");
  cmd_extract->add_option("--kernel-size", ex.bank.kernel_size, "odd kernel side length");
  cmd_extract->callback([&]() {
    const Image gray = orient2d::to_luminance(load_image_any(ex.image));
    Image mask;
    if (!ex.mask.empty()) mask = load_image_any(ex.mask);
    const auto bank = orient2d::GaborBank::build(ex.bank);
    const auto [orient, conf] = orient2d::extract_orientation(gray, bank, mask);
    ensure_parent(ex.out_orient);
    ensure_parent(ex.out_conf);
    save_raster(ex.out_orient, orient.raster());
    save_raster(ex.out_conf, conf.raster());
    std::cout << "wrote " << ex.out_orient << " and " << ex.out_conf << "\n";
  });

  // --- render-depth ----------------------------------------------------------
  auto* cmd_depth = app.add_subcommand("render-depth", "depth maps from a point cloud");
  struct {
    std::string cloud, cameras, out_dir;
    int splat = 1;
  } rd;
  cmd_depth->add_option("--cloud", rd.cloud, "point cloud .ply")->required();
  cmd_depth->add_option("--cameras", rd.cameras, "camera set file")->required();
  cmd_depth->add_option("--out-dir", rd.out_dir, "directory for depth_NNN.hrrf")->required();
  cmd_depth->add_option("--splat-radius", rd.splat, "square splat half-width, px");
  cmd_depth->callback([&]() {
    const auto views = load_cameras(rd.cameras);
    const auto cloud = load_ply(rd.cloud);
    fs::create_directories(rd.out_dir);
    for (std::size_t i = 0; i < views.size(); ++i) {
      const DepthMap d = mvs::render_depth(views[i], cloud.points, rd.splat);
      save_raster(view_file(rd.out_dir, "depth_", static_cast<int>(i)).string(), d.raster());
    }
    std::cout << "wrote " << views.size() << " depth maps to " << rd.out_dir << "\n";
  });

  // --- classify ----------------------------------------------------------------
  auto* cmd_classify = app.add_subcommand("classify",
                                          "interior/exterior flag per cloud point");
  struct {
    std::string cloud, cameras, depth_dir, out;
    double tau = mvs::kDefaultTau;
  } cl;
  cmd_classify->add_option("--cloud", cl.cloud, "point cloud .ply")->required();
  cmd_classify->add_option("--cameras", cl.cameras, "camera set file")->required();
  cmd_classify->add_option("--depth-dir", cl.depth_dir, "directory with depth_NNN.hrrf")
      ->required();
  cmd_classify->add_option("--out", cl.out, "text output, one 0/1 per point (1 = interior)")
      ->required();
  cmd_classify->add_option("--tau", cl.tau, "visibility slack, mm");
  cmd_classify->callback([&]() {
    const auto views = load_cameras(cl.cameras);
    const auto cloud = load_ply(cl.cloud);
    const auto depths = load_depths(cl.depth_dir, static_cast<int>(views.size()));
    ensure_parent(cl.out);
    std::ofstream os(cl.out);
    if (!os) throw FileError("cannot write " + cl.out);
    std::size_t interior_count = 0;
    for (const Vec3& p : cloud.points) {
      const bool interior = mvs::classify_interior(p, views, depths, cl.tau);
      interior_count += interior;
      os << (interior ? '1' : '0') << '\n';
    }
    std::cout << interior_count << " of " << cloud.points.size() << " points interior\n";
  });

  // --- pmvo ----------------------------------------------------------------------
  auto* cmd_pmvo = app.add_subcommand("pmvo", "per-point 3D line optimization");
  struct {
    std::string cloud, cameras, orient_dir, conf_dir, depth_dir, config, out;
  } pm;
  cmd_pmvo->add_option("--cloud", pm.cloud, "candidate point cloud .ply")->required();
  cmd_pmvo->add_option("--cameras", pm.cameras, "camera set file")->required();
  cmd_pmvo->add_option("--orient-dir", pm.orient_dir, "directory with orient_NNN.hrrf")
      ->required();
  cmd_pmvo->add_option("--conf-dir", pm.conf_dir, "directory with conf_NNN.hrrf")->required();
  cmd_pmvo->add_option("--depth-dir", pm.depth_dir,
                       "directory with depth_NNN.hrrf (rendered from --cloud if omitted)");
  cmd_pmvo->add_option("--config", pm.config, "JSON file with optimizer settings");
  cmd_pmvo->add_option("--out", pm.out, "line map .ply out")->required();
  cmd_pmvo->callback([&]() {
    const auto views = load_cameras(pm.cameras);
    const auto cloud = load_ply(pm.cloud);
    pmvo::PmvoConfig cfg;
    if (!pm.config.empty()) {
      const json j = load_json(pm.config);
      const json s = j.contains("pmvo") ? j.at("pmvo") : j;
      cfg.patch_size = s.value("patch_size", cfg.patch_size);
      cfg.keep_threshold = s.value("keep_threshold", cfg.keep_threshold);
      cfg.neighbor_count = s.value("neighbor_count", cfg.neighbor_count);
      cfg.refine_threshold = s.value("refine_threshold", cfg.refine_threshold);
      cfg.reference_frames = s.value("reference_frames", cfg.reference_frames);
      cfg.tau = s.value("tau", cfg.tau);
      cfg.angular_samples = s.value("angular_samples", cfg.angular_samples);
      cfg.min_spacing = s.value("min_spacing", cfg.min_spacing);
    }
    cfg.validate();
    std::vector<pmvo::ViewData> data;
    data.reserve(views.size());
    for (std::size_t i = 0; i < views.size(); ++i) {
      const int vi = static_cast<int>(i);
      DepthMap depth = pm.depth_dir.empty()
                           ? mvs::render_depth(views[i], cloud.points)
                           : DepthMap(load_raster(view_file(pm.depth_dir, "depth_", vi).string()));
      data.push_back({views[i],
                      OrientationMap(load_raster(view_file(pm.orient_dir, "orient_", vi).string())),
                      ConfidenceMap(load_raster(view_file(pm.conf_dir, "conf_", vi).string())),
                      std::move(depth)});
    }
    const auto estimates = pmvo::optimize_all(cloud.points, data, cfg);
    const LineMap filtered = pmvo::filter_lines(cloud.points, estimates, data, cfg);
    const LineMap refined = pmvo::refine_lines(filtered, cfg);
    ensure_parent(pm.out);
    save_linemap_ply(pm.out, refined);
    std::cout << "kept " << refined.size() << " of " << cloud.points.size() << " points -> "
              << pm.out << "\n";
  });

  // --- render-strandmaps ------------------------------------------------------------
  auto* cmd_sm = app.add_subcommand("render-strandmaps",
                                    "doubled-angle strand maps from the fixed rig");
  struct {
    std::string linemap, out_dir;
    std::vector<double> center;
    double radius = 600.0, focal = 800.0, grow = 2.0;
    int width = 1280, height = 720;
  } sm;
  cmd_sm->add_option("--linemap", sm.linemap, "line map .ply")->required();
  cmd_sm->add_option("--out-dir", sm.out_dir, "directory for strandmap_NNN.hrrf")->required();
  cmd_sm->add_option("--center", sm.center, "rig target x y z (default: line map center)")
      ->expected(3);
  cmd_sm->add_option("--radius", sm.radius, "rig radius, mm");
  cmd_sm->add_option("--focal", sm.focal, "focal length, px");
  cmd_sm->add_option("--width", sm.width, "image width");
  cmd_sm->add_option("--height", sm.height, "image height");
  cmd_sm->add_option("--grow", sm.grow, "segment half-length per point, mm");
  cmd_sm->callback([&]() {
    const LineMap map = load_linemap_ply(sm.linemap);
    if (map.empty()) throw ValidationError("line map is empty");
    Vec3 center;
    if (sm.center.size() == 3) {
      center = Vec3(sm.center[0], sm.center[1], sm.center[2]);
    } else {
      Vec3 lo = map.points().front().position, hi = lo;
      for (const OrientedPoint& p : map.points()) {
        lo = lo.cwiseMin(p.position);
        hi = hi.cwiseMax(p.position);
      }
      center = 0.5 * (lo + hi);
    }
    const auto rig = strandmap::fixed_view_rig(center, sm.radius, sm.focal, sm.width, sm.height);
    const auto renders = strandmap::render_strand_maps(map, rig, sm.grow);
    fs::create_directories(sm.out_dir);
    for (std::size_t i = 0; i < renders.size(); ++i) {
      const int vi = static_cast<int>(i);
      save_raster(view_file(sm.out_dir, "strandmap_", vi).string(), renders[i].map.raster());
      save_raster(view_file(sm.out_dir, "smdepth_", vi).string(), renders[i].depth.raster());
    }
    std::cout << "wrote " << renders.size() << " strand maps to " << sm.out_dir << "\n";
  });

  // --- interior ------------------------------------------------------------------------
  auto* cmd_interior = app.add_subcommand("interior",
                                          "complete the direction field inside the hair shell");
  struct {
    std::string linemap, scalp, out;
    double voxel = 3.0;
    int margin = -1;
    interior::InteriorConfig cfg;
  } in;
  cmd_interior->add_option("--linemap", in.linemap, "line map .ply")->required();
  cmd_interior->add_option("--scalp", in.scalp, "scalp mesh .ply")->required();
  cmd_interior->add_option("--out", in.out, "orientation grid out")->required();
  cmd_interior->add_option("--voxel-size", in.voxel, "voxel edge, mm");
  cmd_interior->add_option("--closing-radius", in.cfg.closing_radius, "shell closing, voxels");
  cmd_interior->add_option("--sweeps", in.cfg.diffusion_sweeps, "direction relaxation passes");
  cmd_interior->add_option("--max-open-fraction", in.cfg.max_open_fraction,
                           "tolerated uncovered scalp fraction");
  cmd_interior->add_option("--margin-voxels", in.margin,
                           "grid padding (default: closing radius + 2)");
  cmd_interior->callback([&]() {
    if (in.voxel <= 0.0) throw ValidationError("voxel size must be positive");
    const LineMap map = load_linemap_ply(in.linemap);
    const ScalpModel scalp = load_scalp(in.scalp);
    if (map.empty()) throw ValidationError("line map is empty");
    Vec3 lo = map.points().front().position, hi = lo;
    for (const OrientedPoint& p : map.points()) {
      lo = lo.cwiseMin(p.position);
      hi = hi.cwiseMax(p.position);
    }
    for (const Vec3& v : scalp.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    const int pad = in.margin >= 0 ? in.margin : in.cfg.closing_radius + 2;
    GridSpec spec;
    spec.voxel_size = in.voxel;
    spec.origin = lo - pad * in.voxel * Vec3::Ones();
    const Vec3 extent = (hi - spec.origin) / in.voxel;
    spec.dims = Eigen::Vector3i(static_cast<int>(std::ceil(extent.x())) + 1 + pad,
                                static_cast<int>(std::ceil(extent.y())) + 1 + pad,
                                static_cast<int>(std::ceil(extent.z())) + 1 + pad);
    const auto result = interior::complete_interior(map, scalp, spec, in.cfg);
    ensure_parent(in.out);
    save_grid(in.out, result.grid);
    std::cout << result.exterior_voxels << " exterior + " << result.interior_voxels
              << " interior voxels -> " << in.out << "\n";
  });

  // --- grow ----------------------------------------------------------------------------
  auto* cmd_grow = app.add_subcommand("grow", "trace and connect strands through the field");
  struct {
    std::string grid, scalp, out, linemap, cameras, depth_dir;
    double step = 0.0, tau = mvs::kDefaultTau;
    int stride = 2, max_steps = 10000;
    strandgen::ConnectConfig cfg;
    double bridge = 0.0;
  } gw;
  cmd_grow->add_option("--grid", gw.grid, "orientation grid")->required();
  cmd_grow->add_option("--scalp", gw.scalp, "scalp mesh .ply")->required();
  cmd_grow->add_option("--out", gw.out, "strand set out")->required();
  cmd_grow->add_option("--linemap", gw.linemap, "exterior line map to overlay before tracing");
  cmd_grow->add_option("--cameras", gw.cameras, "cameras for interior visibility filtering");
  cmd_grow->add_option("--depth-dir", gw.depth_dir, "depth maps for visibility filtering");
  cmd_grow->add_option("--step", gw.step, "integration step, mm (0 = voxel/2)");
  cmd_grow->add_option("--seed-stride", gw.stride, "seed stratification stride, voxels");
  cmd_grow->add_option("--max-steps", gw.max_steps, "step cap per direction");
  cmd_grow->add_option("--chain-gap", gw.cfg.chain_gap, "max endpoint gap, mm");
  cmd_grow->add_option("--chain-angle", gw.cfg.chain_angle_deg, "max end-tangent angle, deg");
  cmd_grow->add_option("--root-distance", gw.cfg.root_distance, "scalp rooting distance, mm");
  cmd_grow->add_option("--attach-distance", gw.cfg.attach_distance,
                       "sign disambiguation distance, mm");
  cmd_grow->add_option("--graft-distance", gw.cfg.graft_distance, "grafting distance, mm");
  cmd_grow->add_option("--bridge-step", gw.bridge, "bridge vertex spacing, mm (0 = step)");
  cmd_grow->add_option("--tau", gw.tau, "visibility slack, mm");
  cmd_grow->callback([&]() {
    const OrientationGrid igrid = load_grid(gw.grid);
    const ScalpModel scalp = load_scalp(gw.scalp);
    OrientationGrid merged;
    const OrientationGrid* field = &igrid;
    if (!gw.linemap.empty()) {
      const LineMap map = load_linemap_ply(gw.linemap);
      if (!gw.cameras.empty() && !gw.depth_dir.empty()) {
        const auto views = load_cameras(gw.cameras);
        const auto depths = load_depths(gw.depth_dir, static_cast<int>(views.size()));
        merged = strandgen::merge_geometry(map, igrid, views, depths, gw.tau);
      } else {
        merged = strandgen::merge_geometry(map, igrid);
      }
      field = &merged;
    }
    const double step = gw.step > 0.0 ? gw.step : field->voxel_size() / 2.0;
    const auto seeds = strandgen::stratified_seeds(*field, gw.stride);
    const StrandSet segments = strandgen::trace_segments(*field, seeds, step, gw.max_steps);
    if (segments.empty()) throw ValidationError("tracing produced no segments");
    gw.cfg.bridge_step = gw.bridge > 0.0 ? gw.bridge : step;
    const auto connected = strandgen::connect_strands(segments, scalp, gw.cfg);
    ensure_parent(gw.out);
    save_strands(gw.out, connected.strands);
    std::cout << connected.strands.size() << " strands (" << connected.rooted << " rooted, "
              << connected.attached << " grafted, " << connected.unrooted << " loose) -> "
              << gw.out << "\n";
  });

  // --- synth ------------------------------------------------------------------------------
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic oracle scene");
  struct {
    std::string out_dir = "scene", style = "wavy";
    int strands = 50, views = 24, width = 960, height = 540, thickness = 1;
    unsigned seed = 1;
    double focal = 700.0, radius = 600.0, noise = 0.3;
    std::vector<double> elevations{15.0, 45.0};
  } sy;
  cmd_synth->add_option("--out-dir", sy.out_dir, "scene directory");
  cmd_synth->add_option("--style", sy.style, "straight | wavy | helix");
  cmd_synth->add_option("--strands", sy.strands, "strand count");
  cmd_synth->add_option("--seed", sy.seed, "random seed");
  cmd_synth->add_option("--views", sy.views, "camera count");
  cmd_synth->add_option("--width", sy.width, "image width");
  cmd_synth->add_option("--height", sy.height, "image height");
  cmd_synth->add_option("--focal", sy.focal, "focal length, px");
  cmd_synth->add_option("--radius", sy.radius, "rig radius, mm");
  cmd_synth->add_option("--elevations", sy.elevations, "rig elevation rings, deg")
      ->expected(-1);
  cmd_synth->add_option("--noise", sy.noise, "injected noise fraction of output cloud");
  cmd_synth->add_option("--thickness", sy.thickness, "rendered strand splat, px");
  cmd_synth->callback([&]() {
    const json cfg{{"style", sy.style},      {"strand_count", sy.strands},
                   {"seed", sy.seed},        {"views", sy.views},
                   {"image_width", sy.width}, {"image_height", sy.height},
                   {"focal", sy.focal},      {"rig_radius", sy.radius},
                   {"rig_elevations", sy.elevations}, {"noise_fraction", sy.noise},
                   {"thickness", sy.thickness}};
    const json counts = pipeline::synth_scene(cfg, sy.out_dir);
    std::cout << counts.dump() << "\n";
  });

  // --- eval --------------------------------------------------------------------------------
  auto* cmd_eval = app.add_subcommand("eval", "precision/recall/F against ground truth");
  struct {
    std::string pred, gt, thresholds = "2/20,3/30,4/40", report;
  } ev;
  cmd_eval->add_option("--pred", ev.pred, "predicted strand set")->required();
  cmd_eval->add_option("--gt", ev.gt, "ground-truth strand set")->required();
  cmd_eval->add_option("--thresholds", ev.thresholds, "comma list of mm/deg pairs");
  cmd_eval->add_option("--report", ev.report, "JSON report out");
  cmd_eval->callback([&]() {
    const auto thresholds = parse_thresholds(ev.thresholds);
    const auto pred = synth::resample_for_eval(load_strands(ev.pred));
    const auto gt = synth::resample_for_eval(load_strands(ev.gt));
    const auto scores = synth::evaluate(pred, gt, thresholds);
    json rows = json::array();
    for (const auto& s : scores) {
      std::printf("%5.1f mm / %5.1f deg   P %6.2f   R %6.2f   F %6.2f\n",
                  s.threshold.distance_mm, s.threshold.angle_deg, s.precision, s.recall,
                  s.f_score);
      rows.push_back({{"distance_mm", s.threshold.distance_mm},
                      {"angle_deg", s.threshold.angle_deg},
                      {"precision", s.precision},
                      {"recall", s.recall},
                      {"f_score", s.f_score}});
    }
    if (!ev.report.empty()) {
      ensure_parent(ev.report);
      std::ofstream os(ev.report);
      os << json{{"thresholds", rows}}.dump(2) << "\n";
      if (!os) throw FileError("cannot write " + ev.report);
    }
  });

  // --- run ---------------------------------------------------------------------------------
  auto* cmd_run = app.add_subcommand("run", "staged end-to-end reconstruction");
  struct {
    std::string config, out_dir, emit;
    bool demo = false, force = false;
  } rn;
  cmd_run->add_option("--config", rn.config, "pipeline config JSON");
  cmd_run->add_flag("--demo", rn.demo, "run the bundled synthetic scene");
  cmd_run->add_option("--out-dir", rn.out_dir, "override the config's out_dir");
  cmd_run->add_flag("--force", rn.force, "re-run stages even when outputs exist");
  cmd_run->add_option("--emit-demo-config", rn.emit, "write the demo config JSON and exit");
  cmd_run->callback([&]() {
    if (!rn.emit.empty()) {
      ensure_parent(rn.emit);
      std::ofstream os(rn.emit);
      os << pipeline::demo_config().dump(2) << "\n";
      if (!os) throw FileError("cannot write " + rn.emit);
      std::cout << "wrote " << rn.emit << "\n";
      return;
    }
    if (!rn.demo && rn.config.empty()) throw ValidationError("run needs --config or --demo");
    if (rn.demo && !rn.config.empty())
      throw ValidationError("--demo and --config are mutually exclusive");
    json config = rn.demo ? pipeline::demo_config() : load_json(rn.config);
    if (!rn.out_dir.empty()) config["out_dir"] = rn.out_dir;
    const fs::path base =
        rn.demo ? fs::current_path() : fs::absolute(rn.config).parent_path();
    const auto report = pipeline::run_pipeline(config, base, rn.force, threads);
    for (const json& stage : report.summary.at("stages")) {
      std::printf("%-18s %s\n", stage.at("name").get<std::string>().c_str(),
                  stage.value("skipped", false)
                      ? "skipped (cached)"
                      : (std::to_string(stage.value("seconds", 0.0)) + " s").c_str());
    }
    if (report.summary.contains("eval")) {
      for (const json& row : report.summary.at("eval").at("thresholds"))
        std::printf("%5.1f mm / %5.1f deg   P %6.2f   R %6.2f   F %6.2f\n",
                    row.at("distance_mm").get<double>(), row.at("angle_deg").get<double>(),
                    row.at("precision").get<double>(), row.at("recall").get<double>(),
                    row.at("f_score").get<double>());
    }
    std::cout << "strands: " << report.strands_path.string() << "\n";
  });

  for (CLI::App* sub : app.get_subcommands({}))
    sub->add_option("--threads", threads, "cap worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    if (argc > 1) {
      // --threads applies before any subcommand work; CLI11 callbacks run
      // during parse, so scan early.
      for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--threads") hairrec::set_threads(std::atoi(argv[i + 1]));
    }
    return run_main(argc, argv);
  } catch (const hairrec::pipeline::StageError& e) {
    std::cerr << "stage failure: " << e.what() << "\n";
    return 2;
  } catch (const hairrec::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const hairrec::DimensionMismatchError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const hairrec::FileError& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return 1;
  } catch (const hairrec::MalformedHeaderError& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return 1;
  } catch (const hairrec::TruncatedFileError& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
