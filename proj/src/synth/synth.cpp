#include "hairrec/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hairrec/core/errors.hpp"
#include "hairrec/core/kdtree.hpp"

namespace hairrec::synth {
namespace {

// mt19937 with explicit scaling so streams are reproducible across standard
// library implementations.
struct Rng {
  explicit Rng(uint32_t seed) : gen(seed) {}

  double uniform() { return gen() * (1.0 / 4294967296.0); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::mt19937 gen;
};

Vec3 spherical(double polar, double azimuth) {
  const double s = std::sin(polar);
  return {s * std::cos(azimuth), s * std::sin(azimuth), std::cos(polar)};
}

ScalpModel make_scalp(const HairstyleConfig& cfg) {
  ScalpModel scalp;
  const double cap = deg2rad(cfg.cap_angle_deg);
  const int rings = std::max(2, cfg.scalp_rings);
  const int sectors = std::max(3, cfg.scalp_sectors);

  scalp.vertices.push_back({0.0, 0.0, cfg.scalp_radius});
  for (int r = 1; r <= rings; ++r) {
    const double polar = cap * r / rings;
    for (int s = 0; s < sectors; ++s) {
      const double azimuth = 2.0 * kPi * s / sectors;
      scalp.vertices.push_back(cfg.scalp_radius * spherical(polar, azimuth));
    }
  }

  auto ring_vertex = [&](int r, int s) { return 1 + (r - 1) * sectors + (s % sectors); };
  auto push_face = [&](int a, int b, int c) {
    // Outward winding: normal must point away from the head centre.
    const Vec3 n = (scalp.vertices[b] - scalp.vertices[a])
                       .cross(scalp.vertices[c] - scalp.vertices[a]);
    const Vec3 centroid = (scalp.vertices[a] + scalp.vertices[b] + scalp.vertices[c]) / 3.0;
    if (n.dot(centroid) < 0.0) std::swap(b, c);
    scalp.faces.push_back({a, b, c});
  };

  for (int s = 0; s < sectors; ++s) push_face(0, ring_vertex(1, s), ring_vertex(1, s + 1));
  for (int r = 1; r < rings; ++r) {
    for (int s = 0; s < sectors; ++s) {
      const int a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
      const int c = ring_vertex(r + 1, s + 1), d = ring_vertex(r + 1, s);
      push_face(a, b, c);
      push_face(a, c, d);
    }
  }
  return scalp;
}

void sample_roots(ScalpModel& scalp, int count, Rng& rng) {
  std::vector<double> cumulative;
  cumulative.reserve(scalp.faces.size());
  double total = 0.0;
  for (const auto& f : scalp.faces) {
    const Vec3& a = scalp.vertices[f[0]];
    const Vec3 ab = scalp.vertices[f[1]] - a, ac = scalp.vertices[f[2]] - a;
    total += 0.5 * ab.cross(ac).norm();
    cumulative.push_back(total);
  }
  for (int i = 0; i < count; ++i) {
    const double pick = rng.uniform() * total;
    const size_t fi =
        std::lower_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin();
    const auto& f = scalp.faces[std::min(fi, scalp.faces.size() - 1)];
    double u = rng.uniform(), v = rng.uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    scalp.root_sites.push_back(scalp.vertices[f[0]] * (1.0 - u - v) + scalp.vertices[f[1]] * u +
                               scalp.vertices[f[2]] * v);
  }
}

Strand grow_strand(const HairstyleConfig& cfg, const Vec3& root) {
  const double grow_radius = cfg.scalp_radius + cfg.hover;
  const double polar0 = std::acos(std::clamp(root.z() / root.norm(), -1.0, 1.0));
  const double azimuth = std::atan2(root.y(), root.x());
  // Wave phase and hang angle vary smoothly with azimuth so vertically
  // stacked strands move together while distant regions decorrelate. An
  // integer cycle count keeps the field continuous across the seam.
  const double phase = cfg.wave_cycles * azimuth;
  const double hang =
      deg2rad(cfg.hang_angle_deg + cfg.hang_spread_deg * std::sin(2.0 * azimuth));

  Strand strand;
  strand.vertices.reserve(cfg.strand_vertices);

  if (cfg.style == Style::kHelix) {
    const Vec3 radial = spherical(polar0, azimuth);
    const Vec3 axis = Vec3(std::cos(polar0) * std::cos(azimuth),
                           std::cos(polar0) * std::sin(azimuth), -std::sin(polar0));
    const Vec3 binormal = axis.cross(radial);
    const double a = cfg.helix_radius, b = cfg.helix_pitch;
    const Vec3 start = root.normalized() * grow_radius;
    const Vec3 centre = start + a * radial;  // helix axis sits outside the head
    const double dt = cfg.step / std::sqrt(a * a + b * b);
    for (int k = 0; k < cfg.strand_vertices; ++k) {
      const double t = k * dt;
      strand.vertices.push_back(centre - a * std::cos(t) * radial + a * std::sin(t) * binormal +
                                b * t * axis);
    }
    return strand;
  }

  // Lean tilts the whole growth direction sideways. It rotates strands
  // rigidly (no extra curvature, so patches stay smooth) yet makes distant
  // regions of the head point differently even where the waves are small.
  const double lean = deg2rad(cfg.lean_deg) * std::sin(cfg.lean_cycles * azimuth);
  const double cos_lean = std::cos(lean), sin_lean = std::sin(lean);

  double polar = polar0, az = azimuth;
  bool hanging = false;
  Vec3 p = grow_radius * spherical(polar, az);
  Vec3 dir = Vec3::Zero();
  Vec3 wave_bin(-std::sin(az), std::cos(az), 0.0);
  for (int k = 0; k < cfg.strand_vertices; ++k) {
    Vec3 out = p;
    if (cfg.style == Style::kWavy) {
      const double s = k * cfg.step;
      const double ramp = cfg.wave_ramp > 0.0 ? std::min(1.0, s / cfg.wave_ramp) : 1.0;
      out += ramp * cfg.wave_amplitude * std::sin(2.0 * kPi * s / cfg.wave_period + phase) *
             wave_bin;
    }
    strand.vertices.push_back(out);

    if (hanging) {
      p += cfg.step * dir;
    } else {
      const Vec3 meridian(std::cos(polar) * std::cos(az), std::cos(polar) * std::sin(az),
                          -std::sin(polar));
      const Vec3 bin(-std::sin(az), std::cos(az), 0.0);
      if (polar + cos_lean * cfg.step / grow_radius >= hang) {
        // Leave the head tangentially; no kink at the transition.
        hanging = true;
        dir = cos_lean * meridian + sin_lean * bin;
        wave_bin = bin;
        p += cfg.step * dir;
      } else {
        polar += cos_lean * cfg.step / grow_radius;
        az += sin_lean * cfg.step / (grow_radius * std::max(std::sin(polar), 0.05));
        p = grow_radius * spherical(polar, az);
        wave_bin = Vec3(-std::sin(az), std::cos(az), 0.0);
      }
    }
  }
  return strand;
}

}  // namespace

Style style_from_string(const std::string& name) {
  if (name == "straight") return Style::kStraight;
  if (name == "wavy") return Style::kWavy;
  if (name == "helix") return Style::kHelix;
  throw ValidationError("unknown hairstyle: " + name);
}

std::string style_name(Style style) {
  switch (style) {
    case Style::kStraight: return "straight";
    case Style::kWavy: return "wavy";
    case Style::kHelix: return "helix";
  }
  return "?";
}

Hairstyle gen_hairstyle(const HairstyleConfig& cfg) {
  if (cfg.strand_count <= 0 || cfg.strand_vertices < 2 || cfg.step <= 0.0 ||
      cfg.scalp_radius <= 0.0)
    throw ValidationError("bad hairstyle config");

  Hairstyle result;
  result.scalp = make_scalp(cfg);
  Rng rng(cfg.seed);
  sample_roots(result.scalp, cfg.strand_count, rng);
  for (const Vec3& root : result.scalp.root_sites)
    result.strands.strands.push_back(grow_strand(cfg, root));
  return result;
}

std::vector<CameraView> ring_rig(const Vec3& center, double radius, double focal, int width,
                                 int height, int count, std::span<const double> elevations_deg) {
  if (count < 1 || elevations_deg.empty() || radius <= 0.0 || focal <= 0.0)
    throw ValidationError("bad rig parameters");
  const int rings = static_cast<int>(elevations_deg.size());
  std::vector<CameraView> views;
  views.reserve(count);
  for (int r = 0; r < rings; ++r) {
    const int n = count / rings + (r < count % rings ? 1 : 0);
    if (n == 0) continue;
    const double el = deg2rad(elevations_deg[r]);
    for (int j = 0; j < n; ++j) {
      const double az = 2.0 * kPi * (j + static_cast<double>(r) / rings) / n;
      const Vec3 eye = center + radius * Vec3(std::cos(el) * std::cos(az),
                                              std::cos(el) * std::sin(az), std::sin(el));
      views.push_back(make_lookat_camera(eye, center, Vec3::UnitZ(), focal, focal, width, height));
    }
  }
  return views;
}

GtMaps render_gt_maps(const StrandSet& strands, const CameraView& view, int thickness) {
  GtMaps maps{OrientationMap(view.width, view.height), ConfidenceMap(view.width, view.height),
              DepthMap(view.width, view.height)};

  auto write = [&](int x, int y, double depth, double angle) {
    if (x < 0 || y < 0 || x >= view.width || y >= view.height) return;
    if (depth < maps.depth.depth(x, y)) {
      maps.depth.set(x, y, static_cast<float>(depth));
      maps.orient.set(x, y, static_cast<float>(angle));
      maps.conf.set(x, y, 1.0f);
    }
  };

  for (const Strand& strand : strands.strands) {
    for (size_t i = 0; i + 1 < strand.vertices.size(); ++i) {
      const auto p0 = view.project(strand.vertices[i]);
      const auto p1 = view.project(strand.vertices[i + 1]);
      if (!p0 || !p1) continue;
      const Vec2 d = p1->uv - p0->uv;
      if (d.norm() < 1e-12) continue;
      double angle = std::atan2(d.y(), d.x());
      if (angle < 0.0) angle += kPi;
      if (angle >= kPi) angle -= kPi;

      const int samples = std::max(2, static_cast<int>(std::ceil(2.0 * d.cwiseAbs().maxCoeff())) + 1);
      for (int k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) / (samples - 1);
        const Vec2 uv = p0->uv + t * d;
        const double depth = p0->depth + t * (p1->depth - p0->depth);
        const int cx = static_cast<int>(std::lround(uv.x()));
        const int cy = static_cast<int>(std::lround(uv.y()));
        for (int oy = -thickness; oy <= thickness; ++oy)
          for (int ox = -thickness; ox <= thickness; ++ox) write(cx + ox, cy + oy, depth, angle);
      }
    }
  }
  return maps;
}

PointCloud inject_noise(const PointCloud& cloud, double fraction, const Vec3& lo, const Vec3& hi,
                        uint32_t seed) {
  if (fraction < 0.0 || fraction >= 1.0) throw ValidationError("noise fraction must be in [0, 1)");
  if ((hi - lo).minCoeff() < 0.0) throw ValidationError("noise bounds inverted");

  PointCloud out = cloud;
  const auto n_noise =
      static_cast<size_t>(std::llround(cloud.points.size() * fraction / (1.0 - fraction)));
  Rng rng(seed);
  for (size_t i = 0; i < n_noise; ++i) {
    Vec3 p;
    for (int a = 0; a < 3; ++a) p[a] = rng.uniform(lo[a], hi[a]);
    out.points.push_back(p);
    if (!cloud.directions.empty()) {
      const double z = rng.uniform(-1.0, 1.0);
      const double azimuth = rng.uniform(0.0, 2.0 * kPi);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      out.directions.push_back({r * std::cos(azimuth), r * std::sin(azimuth), z});
    }
  }
  return out;
}

EvalPoints resample_for_eval(const StrandSet& strands, double spacing) {
  if (spacing <= 0.0) throw ValidationError("resample spacing must be positive");
  EvalPoints out;
  for (const Strand& strand : strands.strands) {
    const auto& v = strand.vertices;
    if (v.size() < 2) continue;
    double want = 0.0, walked = 0.0;
    for (size_t i = 0; i + 1 < v.size(); ++i) {
      const Vec3 edge = v[i + 1] - v[i];
      const double len = edge.norm();
      if (len < 1e-12) continue;
      const Vec3 tangent = edge / len;
      while (want <= walked + len) {
        const double t = (want - walked) / len;
        out.points.push_back(v[i] + t * edge);
        out.tangents.push_back(tangent);
        want += spacing;
      }
      walked += len;
    }
  }
  return out;
}

EvalPoints eval_points(const LineMap& map) {
  EvalPoints out;
  out.points.reserve(map.size());
  out.tangents.reserve(map.size());
  for (const OrientedPoint& p : map.points()) {
    out.points.push_back(p.position);
    out.tangents.push_back(p.direction);
  }
  return out;
}

namespace {

// Fraction (percent) of `from` points with a counterpart in `to` for each
// threshold, evaluated in one pass per point.
std::vector<size_t> match_counts(const EvalPoints& from, const EvalPoints& to,
                                 std::span<const EvalThreshold> thresholds, bool parallel) {
  const size_t n = from.points.size();
  const size_t nt = thresholds.size();
  std::vector<uint8_t> matched(n * nt, 0);
  if (!to.points.empty() && n > 0) {
    double max_dist = 0.0;
    for (const auto& t : thresholds) max_dist = std::max(max_dist, t.distance_mm);
    const KdTree3 tree(to.points);

#pragma omp parallel for schedule(dynamic, 64) if (parallel)
    for (int64_t i = 0; i < static_cast<int64_t>(n); ++i) {
      const Vec3& p = from.points[i];
      for (int cand : tree.radius(p, max_dist)) {
        const double dist = (to.points[cand] - p).norm();
        const double angle = line_angle(from.tangents[i], to.tangents[cand]);
        for (size_t t = 0; t < nt; ++t) {
          if (!matched[i * nt + t] && dist <= thresholds[t].distance_mm &&
              angle <= deg2rad(thresholds[t].angle_deg))
            matched[i * nt + t] = 1;
        }
      }
    }
  }
  std::vector<size_t> counts(nt, 0);
  for (size_t i = 0; i < n; ++i)
    for (size_t t = 0; t < nt; ++t) counts[t] += matched[i * nt + t];
  return counts;
}

std::vector<EvalScore> evaluate_impl(const EvalPoints& pred, const EvalPoints& gt,
                                     std::span<const EvalThreshold> thresholds, bool parallel) {
  for (const auto& t : thresholds)
    if (t.distance_mm <= 0.0 || t.angle_deg <= 0.0) throw ValidationError("bad eval threshold");

  const auto precision_hits = match_counts(pred, gt, thresholds, parallel);
  const auto recall_hits = match_counts(gt, pred, thresholds, parallel);

  std::vector<EvalScore> scores;
  scores.reserve(thresholds.size());
  for (size_t t = 0; t < thresholds.size(); ++t) {
    EvalScore s;
    s.threshold = thresholds[t];
    s.empty_prediction = pred.empty();
    if (!pred.empty()) s.precision = 100.0 * precision_hits[t] / pred.points.size();
    if (!gt.empty()) s.recall = 100.0 * recall_hits[t] / gt.points.size();
    if (s.precision + s.recall > 0.0)
      s.f_score = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    scores.push_back(s);
  }
  return scores;
}

}  // namespace

std::vector<EvalScore> evaluate(const EvalPoints& pred, const EvalPoints& gt,
                                std::span<const EvalThreshold> thresholds) {
  return evaluate_impl(pred, gt, thresholds, true);
}

std::vector<EvalScore> evaluate_serial(const EvalPoints& pred, const EvalPoints& gt,
                                       std::span<const EvalThreshold> thresholds) {
  return evaluate_impl(pred, gt, thresholds, false);
}

}  // namespace hairrec::synth
