#include "hairrec/pmvo/pmvo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hairrec/core/errors.hpp"
#include "hairrec/core/kdtree.hpp"
#include "hairrec/mvs/visibility.hpp"

namespace hairrec::pmvo {

// Minimum number of views that must contribute to a point's best score
// before the filter will keep it; see the ghost-geometry note in
// filter_lines.
constexpr int kMinSupportViews = 4;

void PmvoConfig::validate() const {
  if (patch_size < 1 || patch_size % 2 == 0) throw ValidationError("patch size must be odd");
  if (keep_threshold <= 0.0 || keep_threshold >= 1.0)
    throw ValidationError("keep threshold must lie in (0, 1)");
  if (neighbor_count < 1) throw ValidationError("neighbor count must be positive");
  if (refine_threshold <= 0.0 || refine_threshold >= 1.0)
    throw ValidationError("refine threshold must lie in (0, 1)");
  if (reference_frames < 1) throw ValidationError("reference frame count must be positive");
  if (tau <= 0.0) throw ValidationError("visibility falloff must be positive");
  if (angular_samples < 4) throw ValidationError("need at least 4 angular samples");
  if (angle_resolution_deg <= 0.0) throw ValidationError("angle resolution must be positive");
  if (confidence_floor < 0.0) throw ValidationError("confidence floor must be non-negative");
  if (direction_probe <= 0.0) throw ValidationError("direction probe must be positive");
  if (min_spacing < 0.0) throw ValidationError("min spacing must be non-negative");
}

double patch_angular_loss(const OrientationMap& orient, const ConfidenceMap& conf, const Vec2& uv,
                          const Vec2& l2d, int patch_size, double conf_floor, double* mass) {
  if (patch_size < 1 || patch_size % 2 == 0) throw ValidationError("patch size must be odd");
  if (orient.width() != conf.width() || orient.height() != conf.height())
    throw DimensionMismatchError("orientation/confidence map sizes differ");
  if (l2d.squaredNorm() < 1e-24)
    throw ValidationError("projected 2D direction is degenerate (zero length)");

  const double theta = std::atan2(l2d.y(), l2d.x());
  const int cx = static_cast<int>(std::lround(uv.x()));
  const int cy = static_cast<int>(std::lround(uv.y()));
  const int half = patch_size / 2;

  double sum = 0.0, total = 0.0;
  for (int dy = -half; dy <= half; ++dy) {
    const int y = cy + dy;
    if (y < 0 || y >= orient.height()) continue;
    for (int dx = -half; dx <= half; ++dx) {
      const int x = cx + dx;
      if (x < 0 || x >= orient.width()) continue;
      if (!orient.masked(x, y)) continue;
      const double c = conf.value(x, y);
      if (c < conf_floor) continue;
      sum += c * (1.0 - std::cos(orientation_diff(orient.angle(x, y), theta)));
      total += c;
    }
  }
  if (mass) *mass = total;
  return sum;
}

std::optional<double> multiview_cost(const Vec3& point, const Vec3& direction,
                                     std::span<const ViewData> views, const PmvoConfig& cfg,
                                     int* contributing) {
  const int margin = cfg.patch_size / 2;
  double sum_wg = 0.0, sum_w = 0.0;
  int count = 0;

  for (const ViewData& vd : views) {
    const auto proj = vd.view.project(point);
    if (!proj || !vd.view.contains(proj->uv, margin)) continue;
    const double vis = mvs::visibility(point, vd.view, vd.depth, cfg.tau);
    if (vis <= 0.0) continue;

    const int cx = static_cast<int>(std::lround(proj->uv.x()));
    const int cy = static_cast<int>(std::lround(proj->uv.y()));
    const double weight = vis * vd.conf.value(cx, cy);
    if (weight <= 0.0) continue;

    const auto probe = vd.view.project(point + cfg.direction_probe * direction);
    if (!probe) continue;
    Vec2 l2d = probe->uv - proj->uv;
    const double len = l2d.norm();
    if (len < 1e-9) continue;  // direction runs along the viewing ray
    l2d /= len;

    double mass = 0.0;
    const double raw =
        patch_angular_loss(vd.orient, vd.conf, proj->uv, l2d, cfg.patch_size,
                           cfg.confidence_floor, &mass);
    if (mass <= 0.0) continue;
    sum_wg += weight * (raw / mass);
    sum_w += weight;
    ++count;
  }

  if (contributing) *contributing = count;
  if (sum_w <= 0.0) return std::nullopt;
  return sum_wg / sum_w;
}

namespace {

double point_to_ray(const Vec3& p, const Vec3& origin, const Vec3& dir) {
  const double dd = dir.dot(dir);
  const double t = dd > 0.0 ? std::max(0.0, dir.dot(p - origin) / dd) : 0.0;
  return (p - (origin + t * dir)).norm();
}

}  // namespace

double ray_distance(const Vec3& origin_a, const Vec3& dir_a, const Vec3& origin_b,
                    const Vec3& dir_b) {
  const Vec3 w0 = origin_a - origin_b;
  const double a = dir_a.dot(dir_a), b = dir_a.dot(dir_b), c = dir_b.dot(dir_b);
  const double d = dir_a.dot(w0), e = dir_b.dot(w0);
  const double denom = a * c - b * b;

  double best = std::min(point_to_ray(origin_a, origin_b, dir_b),
                         point_to_ray(origin_b, origin_a, dir_a));
  if (denom > 1e-12 * std::max(a * c, 1e-300)) {
    const double s = (b * e - c * d) / denom;
    const double t = (a * e - b * d) / denom;
    if (s >= 0.0 && t >= 0.0)
      best = std::min(best, ((origin_a + s * dir_a) - (origin_b + t * dir_b)).norm());
  }
  return best;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CostFn {
  const Vec3& point;
  std::span<const ViewData> views;
  const PmvoConfig& cfg;
  const Vec3 e1, e2;

  double operator()(double alpha) const {
    const Vec3 d = std::cos(alpha) * e1 + std::sin(alpha) * e2;
    const auto c = multiview_cost(point, d, views, cfg);
    return c ? *c : kInf;
  }
};

// Golden-section minimization; returns the best (alpha, cost) seen over all
// evaluations, seeded with the bracket centre.
std::pair<double, double> golden_refine(const CostFn& fn, double centre, double half_width,
                                        double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = centre - half_width, hi = centre + half_width;
  double best_alpha = centre, best_cost = fn(centre);

  auto probe = [&](double alpha) {
    const double cost = fn(alpha);
    if (cost < best_cost) {
      best_cost = cost;
      best_alpha = alpha;
    }
    return cost;
  };

  double c = hi - kInvPhi * (hi - lo), d = lo + kInvPhi * (hi - lo);
  double fc = probe(c), fd = probe(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = probe(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = probe(d);
    }
  }
  return {best_alpha, best_cost};
}

}  // namespace

LineEstimate optimize_line(const Vec3& point, std::span<const ViewData> views,
                           const PmvoConfig& cfg) {
  cfg.validate();
  const int margin = cfg.patch_size / 2;

  // Reference frames: views that see the point with usable confidence,
  // ranked by confidence at the projected pixel.
  struct Ref {
    int view;
    double conf;
    Vec2 uv;
  };
  std::vector<Ref> refs;
  for (size_t i = 0; i < views.size(); ++i) {
    const ViewData& vd = views[i];
    const auto proj = vd.view.project(point);
    if (!proj || !vd.view.contains(proj->uv, margin)) continue;
    if (mvs::visibility(point, vd.view, vd.depth, cfg.tau) <= 0.0) continue;
    const int cx = static_cast<int>(std::lround(proj->uv.x()));
    const int cy = static_cast<int>(std::lround(proj->uv.y()));
    if (!vd.orient.masked(cx, cy)) continue;
    const double c = vd.conf.value(cx, cy);
    if (c < cfg.confidence_floor) continue;
    refs.push_back({static_cast<int>(i), c, proj->uv});
  }

  LineEstimate result;
  if (refs.empty()) return result;

  std::stable_sort(refs.begin(), refs.end(),
                   [](const Ref& a, const Ref& b) { return a.conf > b.conf; });
  if (refs.size() > static_cast<size_t>(cfg.reference_frames))
    refs.resize(cfg.reference_frames);

  double best_cost = kInf;
  Vec3 best_dir = Vec3::UnitZ();
  const double tol = deg2rad(cfg.angle_resolution_deg);
  const double spacing = kPi / cfg.angular_samples;

  for (const Ref& ref : refs) {
    const ViewData& vd = views[ref.view];
    const int cx = static_cast<int>(std::lround(ref.uv.x()));
    const int cy = static_cast<int>(std::lround(ref.uv.y()));
    const double theta = vd.orient.angle(cx, cy);

    // Plane of admissible directions: viewing ray and the lifted 2d
    // orientation, orthogonalized.
    const Vec3 e1 = (point - vd.view.center()).normalized();
    const Vec3 lift = vd.view.rotation.transpose() *
                      Vec3(std::cos(theta) / vd.view.fx, std::sin(theta) / vd.view.fy, 0.0);
    Vec3 e2 = lift - lift.dot(e1) * e1;
    const double e2n = e2.norm();
    if (e2n < 1e-9) continue;
    e2 /= e2n;

    const CostFn fn{point, views, cfg, e1, e2};
    double coarse_alpha = 0.0, coarse_cost = kInf;
    for (int k = 0; k < cfg.angular_samples; ++k) {
      const double alpha = k * spacing;
      const double cost = fn(alpha);
      if (cost < coarse_cost) {
        coarse_cost = cost;
        coarse_alpha = alpha;
      }
    }
    if (coarse_cost == kInf) continue;

    const auto [alpha, cost] = golden_refine(fn, coarse_alpha, spacing, tol);
    if (cost < best_cost) {
      best_cost = cost;
      best_dir = std::cos(alpha) * fn.e1 + std::sin(alpha) * fn.e2;
    }
  }

  if (best_cost == kInf) return result;
  result.optimizable = true;
  result.cost = best_cost;
  result.direction = best_dir.normalized();
  int contributing = 0;
  multiview_cost(point, result.direction, views, cfg, &contributing);
  result.support = contributing;
  result.depth_unconstrained = contributing <= 1;
  return result;
}

namespace {

std::vector<LineEstimate> optimize_impl(std::span<const Vec3> points,
                                        std::span<const ViewData> views, const PmvoConfig& cfg,
                                        bool parallel) {
  cfg.validate();
  std::vector<LineEstimate> out(points.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (int64_t i = 0; i < static_cast<int64_t>(points.size()); ++i)
    out[i] = optimize_line(points[i], views, cfg);
  return out;
}

}  // namespace

std::vector<LineEstimate> optimize_all(std::span<const Vec3> points,
                                       std::span<const ViewData> views, const PmvoConfig& cfg) {
  return optimize_impl(points, views, cfg, true);
}

std::vector<LineEstimate> optimize_all_serial(std::span<const Vec3> points,
                                              std::span<const ViewData> views,
                                              const PmvoConfig& cfg) {
  return optimize_impl(points, views, cfg, false);
}

LineMap filter_lines(std::span<const Vec3> points, std::span<const LineEstimate> estimates,
                     std::span<const ViewData> views, const PmvoConfig& cfg) {
  if (points.size() != estimates.size())
    throw DimensionMismatchError("points/estimates size mismatch");

  std::vector<OrientedPoint> kept;
  for (size_t i = 0; i < points.size(); ++i) {
    const LineEstimate& est = estimates[i];
    // Off-surface ghost points typically score well in only a handful of
    // views: they project onto hair pixels from a narrow fan of cameras and
    // miss the mask everywhere else, and two or three projected orientations
    // can agree with a single 3D line by coincidence (the direction search
    // has a free depth-plane parameter). Genuine surface points are observed
    // by many cameras at once, so demanding several supporting views rejects
    // ghosts without touching real geometry.
    if (!est.optimizable || est.depth_unconstrained || est.support < kMinSupportViews ||
        est.cost >= cfg.keep_threshold)
      continue;
    bool exterior = false;
    for (const ViewData& vd : views) {
      if (mvs::visibility(points[i], vd.view, vd.depth, cfg.tau) > 0.0) {
        exterior = true;
        break;
      }
    }
    if (exterior) kept.push_back({points[i], est.direction});
  }
  return LineMap(kept, cfg.min_spacing);
}

namespace {

LineMap refine_impl(const LineMap& map, const PmvoConfig& cfg, bool parallel) {
  cfg.validate();
  const auto points = map.points();
  if (points.empty()) return map;

  std::vector<Vec3> positions(points.size());
  for (size_t i = 0; i < points.size(); ++i) positions[i] = points[i].position;
  const KdTree3 tree(positions);

  std::vector<OrientedPoint> out(points.begin(), points.end());
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
  for (int64_t i = 0; i < static_cast<int64_t>(points.size()); ++i) {
    const auto neighbors = tree.knn(positions[i], cfg.neighbor_count + 1);
    const Vec3& dir = points[i].direction;
    Vec3 sum = Vec3::Zero();
    for (const int idx : neighbors) {
      if (idx == static_cast<int>(i)) continue;
      const Vec3& nd = points[idx].direction;
      sum += nd.dot(dir) < 0.0 ? -nd : nd;
    }
    const double norm = sum.norm();
    if (norm < 1e-12) continue;
    const Vec3 avg = sum / norm;
    if (1.0 - std::abs(dir.dot(avg)) > cfg.refine_threshold) out[i].direction = avg;
  }
  // Refinement replaces directions only; the point set (and its spacing
  // guarantee) is inherited unchanged from the input map.
  return LineMap(std::move(out), map.min_spacing());
}

}  // namespace

LineMap refine_lines(const LineMap& map, const PmvoConfig& cfg) {
  return refine_impl(map, cfg, true);
}

LineMap refine_lines_serial(const LineMap& map, const PmvoConfig& cfg) {
  return refine_impl(map, cfg, false);
}

}  // namespace hairrec::pmvo
