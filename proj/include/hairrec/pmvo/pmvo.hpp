#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hairrec/core/camera.hpp"
#include "hairrec/core/image.hpp"
#include "hairrec/core/types.hpp"

namespace hairrec::pmvo {

struct PmvoConfig {
  int patch_size = 5;              // odd, pixels
  double keep_threshold = 0.05;    // on the normalized multi-view cost
  int neighbor_count = 100;        // kNN for spatial refinement
  double refine_threshold = 0.015; // deviation that triggers replacement
  int reference_frames = 10;       // views seeding the direction search
  double tau = 5.0;                // visibility falloff, mm
  int angular_samples = 64;        // coarse samples over the half-circle
  double angle_resolution_deg = 0.1;  // golden-section stop width
  double confidence_floor = 1e-3;  // below this a pixel/view does not count
  double direction_probe = 1.0;    // mm; offset used to project a direction
  double min_spacing = 0.5;        // mm; line-map deduplication

  void validate() const;
};

// Everything one camera contributes: calibration plus its three maps.
struct ViewData {
  CameraView view;
  OrientationMap orient;
  ConfidenceMap conf;
  DepthMap depth;
};

// Confidence-weighted angular disagreement between a projected direction
// `l2d` (unit 2d vector) and the orientation map over the r x r patch at
// `uv`. Pixels with no orientation or confidence below `conf_floor` are
// skipped, as are pixels outside the image. Returns the raw weighted sum;
// `mass` (if given) receives the total confidence that participated.
double patch_angular_loss(const OrientationMap& orient, const ConfidenceMap& conf, const Vec2& uv,
                          const Vec2& l2d, int patch_size, double conf_floor = 1e-3,
                          double* mass = nullptr);

// Visibility- and confidence-weighted mean of per-view normalized patch
// losses. Views where the point is invisible, projects outside the patch
// margin, or where the direction projects degenerately are skipped. Empty
// when no view contributes. `contributing` (if given) receives the number
// of views that entered the average.
std::optional<double> multiview_cost(const Vec3& point, const Vec3& direction,
                                     std::span<const ViewData> views, const PmvoConfig& cfg,
                                     int* contributing = nullptr);

// Minimum distance between two rays (origin + t*dir, t >= 0).
double ray_distance(const Vec3& origin_a, const Vec3& dir_a, const Vec3& origin_b,
                    const Vec3& dir_b);

struct LineEstimate {
  Vec3 direction = Vec3::UnitZ();
  double cost = 0.0;
  int support = 0;                  // views contributing to the best score
  bool optimizable = false;         // some view gave this point a usable score
  bool depth_unconstrained = false; // only one view contributed to the best score
};

// Best direction for one point over the admissible one-parameter family:
// for each reference frame the plane spanned by the viewing ray and the
// lifted image orientation is swept coarsely, then the winner is refined by
// golden-section search.
LineEstimate optimize_line(const Vec3& point, std::span<const ViewData> views,
                           const PmvoConfig& cfg);

std::vector<LineEstimate> optimize_all(std::span<const Vec3> points,
                                       std::span<const ViewData> views, const PmvoConfig& cfg);
std::vector<LineEstimate> optimize_all_serial(std::span<const Vec3> points,
                                              std::span<const ViewData> views,
                                              const PmvoConfig& cfg);

// Keep points that scored below the threshold and are visible in at least
// one view; deduplicate into a line map.
LineMap filter_lines(std::span<const Vec3> points, std::span<const LineEstimate> estimates,
                     std::span<const ViewData> views, const PmvoConfig& cfg);

// One pass of neighborhood smoothing: directions deviating from the
// sign-aligned average of their k nearest neighbors get replaced by it.
LineMap refine_lines(const LineMap& map, const PmvoConfig& cfg);
LineMap refine_lines_serial(const LineMap& map, const PmvoConfig& cfg);

}  // namespace hairrec::pmvo
