#pragma once

#include <span>
#include <vector>

#include "hairrec/core/camera.hpp"
#include "hairrec/core/image.hpp"
#include "hairrec/core/io.hpp"
#include "hairrec/core/types.hpp"

namespace hairrec::synth {

enum class Style { kStraight, kWavy, kHelix };

Style style_from_string(const std::string& name);
std::string style_name(Style style);

struct HairstyleConfig {
  Style style = Style::kWavy;
  int strand_count = 50;
  uint32_t seed = 1;

  double scalp_radius = 90.0;    // mm, head sphere
  double cap_angle_deg = 65.0;   // polar extent of the scalp cap from +z
  double hover = 1.5;            // strands ride this far above the scalp
  double step = 1.0;             // vertex spacing, mm
  int strand_vertices = 160;
  double hang_angle_deg = 100.0; // polar angle where strands leave the head and drop

  // The style is spatially coherent, like combed hair: strands at the same
  // azimuth move together (smooth patches for the optimizer) while distant
  // regions point differently (multi-view orientation disagreement at wrong
  // depths). Lean rotates whole strands sideways at no curvature cost;
  // waves ramp in from the root.
  double wave_amplitude = 10.0;    // mm
  double wave_period = 120.0;      // mm arc length per cycle
  int wave_cycles = 1;             // phase wraps around the head this many times
  double wave_ramp = 30.0;         // mm arc length to reach full amplitude
  double hang_spread_deg = 10.0;   // hang angle varies smoothly with azimuth
  double lean_deg = 22.0;          // max sideways drift of the growth direction
  int lean_cycles = 2;             // lean sign wraps around the head this many times

  double helix_radius = 8.0;     // mm
  double helix_pitch = 4.0;      // mm rise per radian

  int scalp_rings = 24;
  int scalp_sectors = 48;
};

struct Hairstyle {
  StrandSet strands;
  ScalpModel scalp;
};

// Parametric hairstyles grown from root sites sampled on a sphere-cap scalp.
// Deterministic per seed.
Hairstyle gen_hairstyle(const HairstyleConfig& config);

// Cameras on rings around `center`, one ring per elevation, staggered in
// azimuth, all aimed at the center.
std::vector<CameraView> ring_rig(const Vec3& center, double radius, double focal, int width,
                                 int height, int count, std::span<const double> elevations_deg);

struct GtMaps {
  OrientationMap orient;
  ConfidenceMap conf;   // 1 on hair pixels
  DepthMap depth;
};

// Rasterize strand polylines with a nearest-depth test; per covered pixel
// the projected tangent angle mod pi, confidence 1 and camera-space depth.
// `thickness` is the half-width of the square splat per sample in pixels
// (0 = single pixel).
GtMaps render_gt_maps(const StrandSet& strands, const CameraView& view, int thickness = 0);

// Adds uniform random points inside [lo, hi] so that noise/total equals
// `fraction`. Deterministic per seed.
PointCloud inject_noise(const PointCloud& cloud, double fraction, const Vec3& lo, const Vec3& hi,
                        uint32_t seed);

// Paired thresholds for the geometric metrics: a prediction point matches
// when some reference point is within `distance_mm` AND the sign-invariant
// tangent angle is within `angle_deg`.
struct EvalThreshold {
  double distance_mm;
  double angle_deg;
};

inline std::vector<EvalThreshold> default_thresholds() {
  return {{2.0, 20.0}, {3.0, 30.0}, {4.0, 40.0}};
}

struct EvalScore {
  EvalThreshold threshold{};
  double precision = 0.0;  // percent
  double recall = 0.0;     // percent
  double f_score = 0.0;    // percent
  bool empty_prediction = false;
};

// Point samples with unit tangents, the common currency of the metrics.
struct EvalPoints {
  std::vector<Vec3> points;
  std::vector<Vec3> tangents;

  bool empty() const { return points.empty(); }
};

// Resample polylines to `spacing` mm arc length; tangents from local edges.
EvalPoints resample_for_eval(const StrandSet& strands, double spacing = 1.0);
EvalPoints eval_points(const LineMap& map);

// Bidirectional point matching: precision = matched(pred -> gt), recall =
// matched(gt -> pred), F = 2PR/(P+R). Parallel over points.
std::vector<EvalScore> evaluate(const EvalPoints& pred, const EvalPoints& gt,
                                std::span<const EvalThreshold> thresholds);
std::vector<EvalScore> evaluate_serial(const EvalPoints& pred, const EvalPoints& gt,
                                       std::span<const EvalThreshold> thresholds);

}  // namespace hairrec::synth
