#include "hairrec/interior/interior.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <unordered_map>

#include <Eigen/Dense>

#include "hairrec/core/errors.hpp"

namespace hairrec::interior {

void InteriorConfig::validate() const {
  if (closing_radius < 0) throw ValidationError("closing radius must be non-negative");
  if (diffusion_sweeps < 0) throw ValidationError("diffusion sweep count must be non-negative");
  if (max_open_fraction < 0.0 || max_open_fraction > 1.0)
    throw ValidationError("max open fraction must be in [0, 1]");
}

double sign_invariant_distance(const Vec3& a, const Vec3& b) {
  const double diff = (a - b).lpNorm<1>();
  const double sum = (a + b).lpNorm<1>();
  return std::min(diff, sum) / 3.0;
}

OrientationGrid splat_linemap(const LineMap& map, const GridSpec& spec) {
  OrientationGrid grid(spec);
  struct Accum {
    Vec3 base, sum;
  };
  std::unordered_map<std::size_t, Accum> cells;
  for (const OrientedPoint& pt : map.points()) {
    const Eigen::Vector3i v = grid.containing_voxel(pt.position);
    if (!grid.in_bounds(v.x(), v.y(), v.z())) continue;
    const std::size_t idx = grid.linear_index(v.x(), v.y(), v.z());
    auto [it, fresh] = cells.try_emplace(idx, Accum{pt.direction, Vec3::Zero()});
    const Vec3& base = it->second.base;
    it->second.sum += pt.direction.dot(base) < 0.0 ? -pt.direction : pt.direction;
  }
  for (const auto& [idx, acc] : cells) {
    const Eigen::Vector3i v = grid.from_linear(idx);
    const double norm = acc.sum.norm();
    const Vec3 dir = norm > 1e-12 ? Vec3(acc.sum / norm) : acc.base;
    grid.set(v.x(), v.y(), v.z(), dir.cast<float>());
  }
  return grid;
}

namespace {

using Mask = std::vector<uint8_t>;

void chebyshev_pass(const Mask& in, Mask& out, const Eigen::Vector3i& dims, bool dilate,
                    bool parallel) {
  const int nx = dims.x(), ny = dims.y(), nz = dims.z();
  auto at = [&](int i, int j, int k) -> uint8_t {
    if (i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz) return 0;
    return in[(static_cast<std::size_t>(k) * ny + j) * nx + i];
  };
#pragma omp parallel for schedule(static) if (parallel)
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        uint8_t v = dilate ? 0 : 1;
        for (int dk = -1; dk <= 1 && (dilate ? !v : v); ++dk)
          for (int dj = -1; dj <= 1 && (dilate ? !v : v); ++dj)
            for (int di = -1; di <= 1 && (dilate ? !v : v); ++di) {
              const uint8_t nb = at(i + di, j + dj, k + dk);
              v = dilate ? (v | nb) : (v & nb);
            }
        out[(static_cast<std::size_t>(k) * ny + j) * nx + i] = v;
      }
    }
  }
}

Mask morphological_close(Mask mask, const Eigen::Vector3i& dims, int radius, bool parallel) {
  Mask other(mask.size());
  for (int r = 0; r < radius; ++r) {
    chebyshev_pass(mask, other, dims, true, parallel);
    std::swap(mask, other);
  }
  for (int r = 0; r < radius; ++r) {
    chebyshev_pass(mask, other, dims, false, parallel);
    std::swap(mask, other);
  }
  return mask;
}

struct HeadSphere {
  Vec3 center;
  double radius;
};

// Least-squares sphere through the scalp vertices.
HeadSphere fit_sphere(const std::vector<Vec3>& pts) {
  Eigen::MatrixXd a(pts.size(), 4);
  Eigen::VectorXd b(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    a.row(i) << 2.0 * pts[i].x(), 2.0 * pts[i].y(), 2.0 * pts[i].z(), 1.0;
    b(i) = pts[i].squaredNorm();
  }
  const Eigen::Vector4d x = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  const Vec3 c = x.head<3>();
  const double r2 = x(3) + c.squaredNorm();
  if (!(r2 > 0.0)) throw ValidationError("scalp vertices do not fit a sphere");
  return {c, std::sqrt(r2)};
}

// Angular histogram around the head centre storing, per direction bin, the
// largest radius at which the closed shell appears.
struct CoverMap {
  static constexpr int kTheta = 64;
  static constexpr int kPhi = 128;
  std::vector<double> max_r = std::vector<double>(kTheta * kPhi, 0.0);

  static std::pair<int, int> bin(const Vec3& dir) {
    const double theta = std::acos(std::clamp(dir.z(), -1.0, 1.0));
    const double phi = std::atan2(dir.y(), dir.x()) + kPi;
    const int bi = std::min(static_cast<int>(theta / kPi * kTheta), kTheta - 1);
    const int bj = std::min(static_cast<int>(phi / (2.0 * kPi) * kPhi), kPhi - 1);
    return {bi, bj};
  }

  void splat(const Vec3& dir, double r) {
    const auto [bi, bj] = bin(dir);
    for (int di = -1; di <= 1; ++di) {
      const int ti = bi + di;
      if (ti < 0 || ti >= kTheta) continue;
      for (int dj = -1; dj <= 1; ++dj) {
        const int tj = (bj + dj + kPhi) % kPhi;
        double& slot = max_r[ti * kPhi + tj];
        slot = std::max(slot, r);
      }
    }
  }

  double covered_radius(const Vec3& dir) const {
    const auto [bi, bj] = bin(dir);
    return max_r[bi * kPhi + bj];
  }
};

std::string format_holes(const std::vector<Vec3>& holes, double fraction) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "hair shell is open over %.1f%% of the scalp; holes near:",
                100.0 * fraction);
  std::string msg = buf;
  for (size_t i = 0; i < holes.size() && i < 8; ++i) {
    std::snprintf(buf, sizeof(buf), " (%.1f, %.1f, %.1f)", holes[i].x(), holes[i].y(),
                  holes[i].z());
    msg += buf;
  }
  return msg;
}

InteriorResult complete_impl(const LineMap& map, const ScalpModel& scalp, const GridSpec& spec,
                             const InteriorConfig& cfg, bool parallel) {
  cfg.validate();
  if (map.empty()) throw ValidationError("line map is empty");
  if (scalp.vertices.empty() || scalp.faces.empty()) throw ValidationError("scalp mesh is empty");

  InteriorResult result{splat_linemap(map, spec), 0, 0};
  OrientationGrid& grid = result.grid;
  result.exterior_voxels = grid.occupied_count();
  const Eigen::Vector3i dims = spec.dims;
  const auto nvox = spec.voxel_count();

  // Closed hair shell.
  Mask shell(nvox, 0);
  for (std::size_t idx : grid.occupied_indices()) shell[idx] = 1;
  shell = morphological_close(std::move(shell), dims, cfg.closing_radius, parallel);

  // Scalp footprint on the grid: sample every face at half-voxel spacing.
  Mask scalp_mask(nvox, 0);
  for (const auto& face : scalp.faces) {
    const Vec3& a = scalp.vertices[face[0]];
    const Vec3 ab = scalp.vertices[face[1]] - a, ac = scalp.vertices[face[2]] - a;
    const double longest = std::max(ab.norm(), std::max(ac.norm(), (ac - ab).norm()));
    const int n = std::max(1, static_cast<int>(std::ceil(longest / (0.5 * spec.voxel_size))));
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n - i; ++j) {
        const Vec3 p = a + (static_cast<double>(i) / n) * ab + (static_cast<double>(j) / n) * ac;
        const Eigen::Vector3i v = grid.containing_voxel(p);
        if (grid.in_bounds(v.x(), v.y(), v.z()))
          scalp_mask[grid.linear_index(v.x(), v.y(), v.z())] = 1;
      }
    }
  }

  const HeadSphere head = fit_sphere(scalp.vertices);

  CoverMap cover;
  {
    std::size_t idx = 0;
    for (int k = 0; k < dims.z(); ++k)
      for (int j = 0; j < dims.y(); ++j)
        for (int i = 0; i < dims.x(); ++i, ++idx) {
          if (!shell[idx]) continue;
          const Vec3 d = grid.voxel_center(i, j, k) - head.center;
          const double r = d.norm();
          if (r > 1e-9) cover.splat(d / r, r);
        }
  }

  // Open-shell diagnostic: scalp voxels whose radial direction never meets
  // the shell.
  {
    std::vector<Vec3> holes;
    std::size_t scalp_bins = 0, open_bins = 0;
    std::vector<uint8_t> seen(CoverMap::kTheta * CoverMap::kPhi, 0);
    for (std::size_t idx = 0; idx < nvox; ++idx) {
      if (!scalp_mask[idx]) continue;
      const Eigen::Vector3i v = grid.from_linear(idx);
      const Vec3 p = grid.voxel_center(v.x(), v.y(), v.z());
      const Vec3 d = p - head.center;
      const double r = d.norm();
      if (r < 1e-9) continue;
      const auto [bi, bj] = CoverMap::bin(d / r);
      uint8_t& mark = seen[bi * CoverMap::kPhi + bj];
      if (mark) continue;
      mark = 1;
      ++scalp_bins;
      if (cover.covered_radius(d / r) < r - 1e-9) {
        ++open_bins;
        holes.push_back(p);
      }
    }
    const double fraction = scalp_bins ? static_cast<double>(open_bins) / scalp_bins : 1.0;
    if (fraction > cfg.max_open_fraction)
      throw ValidationError(format_holes(holes, fraction));
  }

  // Flood fill from the scalp: stay outside the head sphere, under the
  // shell, and out of shell voxels themselves.
  const double head_floor = head.radius - 1.5 * spec.voxel_size;
  auto fillable = [&](int i, int j, int k) {
    const Vec3 d = grid.voxel_center(i, j, k) - head.center;
    const double r = d.norm();
    if (r < head_floor) return false;
    return r < 1e-9 || cover.covered_radius(d / r) >= r - 1e-9;
  };

  Mask filled(nvox, 0);
  std::deque<std::size_t> queue;
  for (std::size_t idx = 0; idx < nvox; ++idx) {
    if (!scalp_mask[idx] || shell[idx]) continue;
    const Eigen::Vector3i v = grid.from_linear(idx);
    if (!fillable(v.x(), v.y(), v.z())) continue;
    filled[idx] = 1;
    queue.push_back(idx);
  }
  constexpr int kSteps[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  while (!queue.empty()) {
    const std::size_t idx = queue.front();
    queue.pop_front();
    const Eigen::Vector3i v = grid.from_linear(idx);
    for (const auto& s : kSteps) {
      const int i = v.x() + s[0], j = v.y() + s[1], k = v.z() + s[2];
      if (!grid.in_bounds(i, j, k)) continue;
      const std::size_t nb = grid.linear_index(i, j, k);
      if (filled[nb] || shell[nb]) continue;
      if (!fillable(i, j, k)) continue;
      filled[nb] = 1;
      queue.push_back(nb);
    }
  }

  // Interior voxels: filled space not already claimed by the exterior splat.
  std::vector<std::size_t> interior_idx;
  for (std::size_t idx = 0; idx < nvox; ++idx) {
    const Eigen::Vector3i v = grid.from_linear(idx);
    if (filled[idx] && !grid.occupied(v.x(), v.y(), v.z())) interior_idx.push_back(idx);
  }
  result.interior_voxels = interior_idx.size();

  std::unordered_map<std::size_t, int> slot;
  slot.reserve(interior_idx.size());
  for (size_t n = 0; n < interior_idx.size(); ++n) slot[interior_idx[n]] = static_cast<int>(n);

  // Seed values: exterior directions as-is; scalp normal at root voxels.
  std::vector<Vec3> dirs(interior_idx.size(), Vec3::Zero());
  std::vector<uint8_t> known(interior_idx.size(), 0);
  for (const Vec3& root : scalp.root_sites) {
    const Eigen::Vector3i v = grid.containing_voxel(root);
    if (!grid.in_bounds(v.x(), v.y(), v.z())) continue;
    const auto it = slot.find(grid.linear_index(v.x(), v.y(), v.z()));
    if (it == slot.end()) continue;
    int face = 0;
    scalp.closest_point(root, &face);
    dirs[it->second] = scalp.face_normal(face);
    known[it->second] = 1;
  }

  // Breadth-first initialization outward from every voxel with a known
  // direction (exterior splat and root priors).
  {
    std::deque<std::size_t> frontier;
    for (std::size_t idx : grid.occupied_indices()) frontier.push_back(idx);
    for (size_t n = 0; n < interior_idx.size(); ++n)
      if (known[n]) frontier.push_back(interior_idx[n]);

    auto dir_of = [&](std::size_t idx, Vec3* out) {
      const Eigen::Vector3i v = grid.from_linear(idx);
      if (grid.occupied(v.x(), v.y(), v.z())) {
        *out = grid.direction(v.x(), v.y(), v.z()).cast<double>();
        return true;
      }
      const auto it = slot.find(idx);
      if (it != slot.end() && known[it->second]) {
        *out = dirs[it->second];
        return true;
      }
      return false;
    };

    while (!frontier.empty()) {
      const std::size_t idx = frontier.front();
      frontier.pop_front();
      const Eigen::Vector3i v = grid.from_linear(idx);
      for (const auto& s : kSteps) {
        const int i = v.x() + s[0], j = v.y() + s[1], k = v.z() + s[2];
        if (!grid.in_bounds(i, j, k)) continue;
        const auto it = slot.find(grid.linear_index(i, j, k));
        if (it == slot.end() || known[it->second]) continue;
        Vec3 base = Vec3::Zero(), sum = Vec3::Zero();
        const Eigen::Vector3i nv(i, j, k);
        for (const auto& s2 : kSteps) {
          const int i2 = nv.x() + s2[0], j2 = nv.y() + s2[1], k2 = nv.z() + s2[2];
          if (!grid.in_bounds(i2, j2, k2)) continue;
          Vec3 d;
          if (!dir_of(grid.linear_index(i2, j2, k2), &d)) continue;
          if (base.isZero()) base = d;
          sum += d.dot(base) < 0.0 ? -d : d;
        }
        const double norm = sum.norm();
        dirs[it->second] = norm > 1e-12 ? Vec3(sum / norm) : Vec3::UnitZ();
        known[it->second] = 1;
        frontier.push_back(grid.linear_index(i, j, k));
      }
    }
    for (size_t n = 0; n < interior_idx.size(); ++n)
      if (!known[n]) dirs[n] = Vec3::UnitZ();  // unreachable pocket
  }

  // Jacobi relaxation; exterior voxels stay fixed.
  std::vector<Vec3> next(dirs.size());
  for (int sweep = 0; sweep < cfg.diffusion_sweeps; ++sweep) {
#pragma omp parallel for schedule(static) if (parallel)
    for (int64_t n = 0; n < static_cast<int64_t>(interior_idx.size()); ++n) {
      const Eigen::Vector3i v = grid.from_linear(interior_idx[n]);
      const Vec3& self = dirs[n];
      Vec3 sum = self;
      for (const auto& s : kSteps) {
        const int i = v.x() + s[0], j = v.y() + s[1], k = v.z() + s[2];
        if (!grid.in_bounds(i, j, k)) continue;
        const std::size_t nb = grid.linear_index(i, j, k);
        Vec3 d;
        if (grid.occupied(i, j, k)) {
          d = grid.direction(i, j, k).cast<double>();
        } else {
          const auto it = slot.find(nb);
          if (it == slot.end()) continue;
          d = dirs[it->second];
        }
        sum += d.dot(self) < 0.0 ? -d : d;
      }
      const double norm = sum.norm();
      next[n] = norm > 1e-12 ? Vec3(sum / norm) : self;
    }
    std::swap(dirs, next);
  }

  for (size_t n = 0; n < interior_idx.size(); ++n) {
    const Eigen::Vector3i v = grid.from_linear(interior_idx[n]);
    grid.set(v.x(), v.y(), v.z(), dirs[n].cast<float>());
  }
  return result;
}

}  // namespace

InteriorResult complete_interior(const LineMap& map, const ScalpModel& scalp, const GridSpec& spec,
                                 const InteriorConfig& cfg) {
  return complete_impl(map, scalp, spec, cfg, true);
}

InteriorResult complete_interior_serial(const LineMap& map, const ScalpModel& scalp,
                                        const GridSpec& spec, const InteriorConfig& cfg) {
  return complete_impl(map, scalp, spec, cfg, false);
}

}  // namespace hairrec::interior
