#include "hairrec/strandgen/strandgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hairrec/core/errors.hpp"
#include "hairrec/core/kdtree.hpp"
#include "hairrec/interior/interior.hpp"
#include "hairrec/mvs/visibility.hpp"

namespace hairrec::strandgen {

OrientationGrid merge_geometry(const OrientationGrid& exterior, const OrientationGrid& interior,
                               std::span<const CameraView> views,
                               std::span<const DepthMap> depths, double tau) {
  if (!(exterior.spec() == interior.spec()))
    throw DimensionMismatchError("exterior/interior grid specs differ");
  if (views.size() != depths.size())
    throw DimensionMismatchError("view/depth map counts differ");

  OrientationGrid out(exterior.spec());
  for (std::size_t idx : interior.occupied_indices()) {
    const Eigen::Vector3i v = interior.from_linear(idx);
    if (exterior.occupied(v.x(), v.y(), v.z())) continue;
    if (!views.empty()) {
      const Vec3 c = interior.voxel_center(v.x(), v.y(), v.z());
      if (!mvs::classify_interior(c, views, depths, tau)) continue;
    }
    out.set(v.x(), v.y(), v.z(), interior.direction(v.x(), v.y(), v.z()));
  }
  for (std::size_t idx : exterior.occupied_indices()) {
    const Eigen::Vector3i v = exterior.from_linear(idx);
    out.set(v.x(), v.y(), v.z(), exterior.direction(v.x(), v.y(), v.z()));
  }
  return out;
}

OrientationGrid merge_geometry(const LineMap& map, const OrientationGrid& interior,
                               std::span<const CameraView> views,
                               std::span<const DepthMap> depths, double tau) {
  return merge_geometry(interior::splat_linemap(map, interior.spec()), interior, views, depths,
                        tau);
}

std::vector<Eigen::Vector3i> stratified_seeds(const OrientationGrid& grid, int stride) {
  if (stride < 1) throw ValidationError("seed stride must be positive");
  std::vector<Eigen::Vector3i> seeds;
  for (std::size_t idx : grid.occupied_indices()) {
    const Eigen::Vector3i v = grid.from_linear(idx);
    if (v.x() % stride == 0 && v.y() % stride == 0 && v.z() % stride == 0) seeds.push_back(v);
  }
  return seeds;
}

namespace {

// Trilinear blend of the 8 surrounding voxel directions, each sign-aligned
// to `ref` first. False when the containing voxel is empty or outside.
bool sample_field(const OrientationGrid& grid, const Vec3& x, const Vec3& ref, Vec3* out) {
  const Eigen::Vector3i cv = grid.containing_voxel(x);
  if (!grid.in_bounds(cv.x(), cv.y(), cv.z()) || !grid.occupied(cv.x(), cv.y(), cv.z()))
    return false;

  const Vec3 g = grid.world_to_voxel(x);
  const Eigen::Vector3i lo(static_cast<int>(std::floor(g.x())), static_cast<int>(std::floor(g.y())),
                           static_cast<int>(std::floor(g.z())));
  const Vec3 f = g - lo.cast<double>();

  Vec3 sum = Vec3::Zero();
  for (int c = 0; c < 8; ++c) {
    const int i = lo.x() + (c & 1), j = lo.y() + ((c >> 1) & 1), k = lo.z() + ((c >> 2) & 1);
    if (!grid.in_bounds(i, j, k) || !grid.occupied(i, j, k)) continue;
    const double w = ((c & 1) ? f.x() : 1.0 - f.x()) * (((c >> 1) & 1) ? f.y() : 1.0 - f.y()) *
                     (((c >> 2) & 1) ? f.z() : 1.0 - f.z());
    if (w <= 0.0) continue;
    const Vec3 d = grid.direction(i, j, k).cast<double>();
    sum += w * (d.dot(ref) < 0.0 ? -d : d);
  }
  const double norm = sum.norm();
  if (norm < 1e-12) return false;
  *out = sum / norm;
  return true;
}

std::vector<Vec3> walk(const OrientationGrid& grid, const Vec3& start, const Vec3& dir0,
                       double h, int max_steps) {
  std::vector<Vec3> verts;
  Vec3 x = start, dir = dir0;
  for (int step = 0; step < max_steps; ++step) {
    Vec3 d;
    if (!sample_field(grid, x, dir, &d)) break;
    if (d.dot(dir) <= 1e-3) break;  // turned ~90 degrees within one step
    x += h * d;
    dir = d;
    verts.push_back(x);
  }
  return verts;
}

StrandSet trace_impl(const OrientationGrid& grid, std::span<const Eigen::Vector3i> seeds,
                     double step, int max_steps, bool parallel) {
  if (step > grid.voxel_size()) throw ValidationError("trace step exceeds voxel size");
  const double h = step > 0.0 ? step : grid.voxel_size() / 2.0;
  if (max_steps < 1) throw ValidationError("max steps must be positive");

  std::vector<Strand> traced(seeds.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (int64_t s = 0; s < static_cast<int64_t>(seeds.size()); ++s) {
    const Eigen::Vector3i& seed = seeds[s];
    if (!grid.in_bounds(seed.x(), seed.y(), seed.z()) ||
        !grid.occupied(seed.x(), seed.y(), seed.z()))
      continue;
    const Vec3 start = grid.voxel_center(seed.x(), seed.y(), seed.z());
    const Vec3 d0 = grid.direction(seed.x(), seed.y(), seed.z()).cast<double>();

    const std::vector<Vec3> fwd = walk(grid, start, d0, h, max_steps);
    std::vector<Vec3> bwd = walk(grid, start, -d0, h, max_steps);
    std::reverse(bwd.begin(), bwd.end());
    bwd.push_back(start);
    bwd.insert(bwd.end(), fwd.begin(), fwd.end());
    traced[s].vertices = std::move(bwd);
  }

  StrandSet out;
  for (auto& strand : traced)
    if (strand.vertices.size() >= 3) out.strands.push_back(std::move(strand));
  return out;
}

}  // namespace

StrandSet trace_segments(const OrientationGrid& grid, std::span<const Eigen::Vector3i> seeds,
                         double step, int max_steps) {
  return trace_impl(grid, seeds, step, max_steps, true);
}

StrandSet trace_segments_serial(const OrientationGrid& grid,
                                std::span<const Eigen::Vector3i> seeds, double step,
                                int max_steps) {
  return trace_impl(grid, seeds, step, max_steps, false);
}

void ConnectConfig::validate() const {
  if (chain_gap <= 0.0 || chain_angle_deg <= 0.0 || root_distance <= 0.0 ||
      attach_distance <= 0.0 || graft_distance <= 0.0 || bridge_step <= 0.0)
    throw ValidationError("connect thresholds must be positive");
}

namespace {

struct Chain {
  std::vector<Vec3> verts;
  bool alive = true;
  bool in_sc = false;    // member of the connected set
  bool rooted = false;   // root end snapped onto the scalp
  bool oriented = false; // growth sign already resolved
};

bool lex_less(const Vec3& a, const Vec3& b) {
  return std::tie(a.x(), a.y(), a.z()) < std::tie(b.x(), b.y(), b.z());
}

// Append `to` at the back of `verts`, inserting evenly spaced bridge
// vertices so no gap exceeds `spacing`.
void append_bridged(std::vector<Vec3>& verts, const Vec3& to, double spacing) {
  const Vec3 from = verts.back();
  const double len = (to - from).norm();
  if (len < 1e-9) return;
  const int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing)));
  for (int k = 1; k <= pieces; ++k)
    verts.push_back(from + (static_cast<double>(k) / pieces) * (to - from));
}

// Outward tangent at a chain end (pointing away from the chain).
Vec3 end_tangent(const Chain& c, int end) {
  const auto& v = c.verts;
  const Vec3 t = end == 0 ? v.front() - v[1] : v.back() - v[v.size() - 2];
  const double n = t.norm();
  return n > 1e-12 ? Vec3(t / n) : Vec3::UnitZ();
}

Vec3 end_pos(const Chain& c, int end) { return end == 0 ? c.verts.front() : c.verts.back(); }

// Closest point on the polyline of `host` to `p`.
Vec3 closest_on_polyline(const std::vector<Vec3>& host, const Vec3& p) {
  Vec3 best = host.front();
  double best_sq = (p - best).squaredNorm();
  for (size_t i = 0; i + 1 < host.size(); ++i) {
    const Vec3 e = host[i + 1] - host[i];
    const double len_sq = e.squaredNorm();
    const double t = len_sq > 0.0 ? std::clamp((p - host[i]).dot(e) / len_sq, 0.0, 1.0) : 0.0;
    const Vec3 q = host[i] + t * e;
    const double sq = (p - q).squaredNorm();
    if (sq < best_sq) {
      best_sq = sq;
      best = q;
    }
  }
  return best;
}

// Vertex index of the tangent of `verts` nearest to vertex `i`.
Vec3 tangent_at(const std::vector<Vec3>& verts, size_t i) {
  const size_t a = i + 1 < verts.size() ? i : i - 1;
  const Vec3 t = verts[a + 1] - verts[a];
  const double n = t.norm();
  return n > 1e-12 ? Vec3(t / n) : Vec3::UnitZ();
}

// Index over the vertices of connected strands.
struct ScIndex {
  std::vector<Vec3> points;
  std::vector<int> chain_of;
  std::vector<size_t> vertex_of;
  std::unique_ptr<KdTree3> tree;

  void rebuild(const std::vector<Chain>& chains) {
    points.clear();
    chain_of.clear();
    vertex_of.clear();
    for (size_t c = 0; c < chains.size(); ++c) {
      if (!chains[c].alive || !chains[c].in_sc) continue;
      for (size_t v = 0; v < chains[c].verts.size(); ++v) {
        points.push_back(chains[c].verts[v]);
        chain_of.push_back(static_cast<int>(c));
        vertex_of.push_back(v);
      }
    }
    tree = points.empty() ? nullptr : std::make_unique<KdTree3>(points);
  }
};

}  // namespace

ConnectResult connect_strands(const StrandSet& segments, const ScalpModel& scalp,
                              const ConnectConfig& cfg) {
  cfg.validate();
  if (segments.empty()) throw ValidationError("no segments to connect");
  if (scalp.vertices.empty() || scalp.faces.empty()) throw ValidationError("scalp mesh is empty");

  // Canonicalize: segment direction and processing order independent of
  // input sign and permutation.
  std::vector<Chain> chains;
  chains.reserve(segments.size());
  for (const Strand& s : segments.strands) {
    if (s.vertices.size() < 2) continue;
    Chain c;
    c.verts = s.vertices;
    if (lex_less(c.verts.back(), c.verts.front())) std::reverse(c.verts.begin(), c.verts.end());
    chains.push_back(std::move(c));
  }
  if (chains.empty()) throw ValidationError("no usable segments");
  std::sort(chains.begin(), chains.end(), [](const Chain& a, const Chain& b) {
    if (lex_less(a.verts.front(), b.verts.front())) return true;
    if (lex_less(b.verts.front(), a.verts.front())) return false;
    return lex_less(a.verts.back(), b.verts.back());
  });

  const double cos_gate = std::cos(deg2rad(cfg.chain_angle_deg));

  // Step 1 + 2: chain mutually-nearest compatible ends until stable.
  for (bool merged = true; merged;) {
    merged = false;

    std::vector<Vec3> end_points;
    std::vector<std::pair<int, int>> end_ids;  // (chain, end)
    for (size_t c = 0; c < chains.size(); ++c) {
      if (!chains[c].alive) continue;
      for (int e = 0; e < 2; ++e) {
        end_points.push_back(end_pos(chains[c], e));
        end_ids.emplace_back(static_cast<int>(c), e);
      }
    }
    if (end_points.size() < 4) break;
    const KdTree3 tree(end_points);

    // Best compatible partner per end; -1 when none.
    std::vector<int> best(end_points.size(), -1);
    for (size_t a = 0; a < end_points.size(); ++a) {
      const auto [ca, ea] = end_ids[a];
      const Vec3 ta = end_tangent(chains[ca], ea);
      double best_sq = cfg.chain_gap * cfg.chain_gap;
      for (int b : tree.radius(end_points[a], cfg.chain_gap)) {
        const auto [cb, eb] = end_ids[b];
        if (cb == ca) continue;
        const double sq = (end_points[b] - end_points[a]).squaredNorm();
        if (sq >= best_sq) continue;
        const Vec3 tb = end_tangent(chains[cb], eb);
        if (std::abs(ta.dot(tb)) < cos_gate) continue;
        best_sq = sq;
        best[a] = b;
      }
    }

    // A merge may reverse the surviving chain, so both participants sit out
    // the rest of the round; the next round re-derives all candidates.
    std::vector<uint8_t> touched(chains.size(), 0);
    for (size_t a = 0; a < end_points.size(); ++a) {
      const int b = best[a];
      if (b < 0 || static_cast<size_t>(b) < a) continue;
      if (best[b] != static_cast<int>(a)) continue;
      auto [ca, ea] = end_ids[a];
      auto [cb, eb] = end_ids[b];
      if (!chains[ca].alive || !chains[cb].alive) continue;
      if (touched[ca] || touched[cb]) continue;
      touched[ca] = touched[cb] = 1;

      // Merge into the lower id: that chain's chosen end becomes its back.
      if (cb < ca) {
        std::swap(ca, cb);
        std::swap(ea, eb);
      }
      Chain& keep = chains[ca];
      Chain& gone = chains[cb];
      if (ea == 0) std::reverse(keep.verts.begin(), keep.verts.end());
      std::vector<Vec3> tail = gone.verts;
      if (eb == 1) std::reverse(tail.begin(), tail.end());
      for (const Vec3& v : tail) append_bridged(keep.verts, v, cfg.bridge_step);
      gone.alive = false;
      gone.verts.clear();
      merged = true;
    }
  }

  // Step 3 + 4 + 5 until an iteration adds nothing.
  ScIndex index;
  for (bool changed = true; changed;) {
    changed = false;

    // Step 3: root strands ending near the scalp.
    for (Chain& c : chains) {
      if (!c.alive || c.in_sc) continue;
      const double d_front = scalp.distance(c.verts.front());
      const double d_back = scalp.distance(c.verts.back());
      if (std::min(d_front, d_back) >= cfg.root_distance) continue;
      if (d_back < d_front) std::reverse(c.verts.begin(), c.verts.end());
      const Vec3 root = scalp.closest_point(c.verts.front());
      if ((root - c.verts.front()).norm() > 1e-9) {
        std::vector<Vec3> v{root};
        for (const Vec3& p : c.verts) append_bridged(v, p, cfg.bridge_step);
        c.verts = std::move(v);
      }
      c.in_sc = c.rooted = c.oriented = true;
      changed = true;
    }

    index.rebuild(chains);
    if (!index.tree) continue;

    // Step 4: resolve growth sign from the most direction-similar connected
    // neighbor within reach.
    for (size_t ci = 0; ci < chains.size(); ++ci) {
      Chain& c = chains[ci];
      if (!c.alive || c.in_sc || c.oriented) continue;
      double best_cos = -1.0;
      int best_chain = -1;
      size_t best_self = 0, best_other = 0;
      for (size_t vi = 0; vi < c.verts.size(); ++vi) {
        for (int n : index.tree->radius(c.verts[vi], cfg.attach_distance)) {
          const Vec3 t_self = tangent_at(c.verts, vi);
          const Vec3 t_other =
              tangent_at(chains[index.chain_of[n]].verts, index.vertex_of[n]);
          const double cs = std::abs(t_self.dot(t_other));
          if (cs > best_cos) {
            best_cos = cs;
            best_chain = index.chain_of[n];
            best_self = vi;
            best_other = index.vertex_of[n];
          }
        }
      }
      if (best_chain < 0) continue;
      const Vec3 t_self = tangent_at(c.verts, best_self);
      const Vec3 t_other = tangent_at(chains[best_chain].verts, best_other);
      if (t_self.dot(t_other) < 0.0) std::reverse(c.verts.begin(), c.verts.end());
      c.oriented = true;
      changed = true;
    }

    // Step 5: graft the remainder onto the closest connected strand.
    bool grafted = false;
    for (size_t ci = 0; ci < chains.size(); ++ci) {
      Chain& c = chains[ci];
      if (!c.alive || c.in_sc) continue;
      // Nearest connected vertex to either end.
      double best_sq = cfg.graft_distance * cfg.graft_distance;
      int host = -1, graft_end = 0;
      for (int e = 0; e < 2; ++e) {
        const Vec3 p = end_pos(c, e);
        for (int n : index.tree->radius(p, cfg.graft_distance)) {
          const double sq = (index.points[n] - p).squaredNorm();
          if (sq < best_sq) {
            best_sq = sq;
            host = index.chain_of[n];
            graft_end = e;
          }
        }
      }
      if (host < 0) continue;
      if (graft_end == 1) std::reverse(c.verts.begin(), c.verts.end());
      const Vec3 junction = closest_on_polyline(chains[host].verts, c.verts.front());
      std::vector<Vec3> v{junction};
      for (const Vec3& p : c.verts) append_bridged(v, p, cfg.bridge_step);
      c.verts = std::move(v);
      c.in_sc = c.oriented = true;
      changed = grafted = true;
    }
    if (grafted) index.rebuild(chains);
  }

  ConnectResult result;
  for (Chain& c : chains) {
    if (!c.alive || c.verts.size() < 2) continue;
    if (c.rooted)
      ++result.rooted;
    else if (c.in_sc)
      ++result.attached;
    else
      ++result.unrooted;
    result.strands.strands.push_back({std::move(c.verts), c.rooted});
  }
  return result;
}

}  // namespace hairrec::strandgen
