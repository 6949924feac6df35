#include "hairrec/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace hairrec {

Vec3 canonical_direction(const Vec3& d, double eps) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) > eps) return d[i] > 0 ? d : Vec3(-d);
  }
  return d;
}

double line_angle(const Vec3& a, const Vec3& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  double c = std::abs(a.dot(b)) / (na * nb);
  c = std::min(c, 1.0);
  return std::acos(c);
}

double orientation_diff(double a, double b) {
  double d = std::fmod(std::abs(a - b), kPi);
  if (d > kPi / 2.0) d = kPi - d;
  return d;
}

namespace {

struct CellKey {
  int64_t x, y, z;
  bool operator==(const CellKey& o) const { return x == o.x && y == o.y && z == o.z; }
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.x) * 73856093u;
    h ^= static_cast<std::size_t>(k.y) * 19349663u;
    h ^= static_cast<std::size_t>(k.z) * 83492791u;
    return h;
  }
};

}  // namespace

LineMap::LineMap(std::vector<OrientedPoint> points, double min_spacing)
    : min_spacing_(min_spacing) {
  if (min_spacing <= 0.0) {
    points_ = std::move(points);
    return;
  }
  // Greedy dedup on a hash grid with cell size = min_spacing; first point
  // wins, so the result is deterministic in input order.
  std::unordered_map<CellKey, std::vector<int>, CellHash> cells;
  cells.reserve(points.size());
  points_.reserve(points.size());
  const double inv = 1.0 / min_spacing;
  const double sq = min_spacing * min_spacing;
  for (const OrientedPoint& p : points) {
    const CellKey key{static_cast<int64_t>(std::floor(p.position.x() * inv)),
                      static_cast<int64_t>(std::floor(p.position.y() * inv)),
                      static_cast<int64_t>(std::floor(p.position.z() * inv))};
    bool blocked = false;
    for (int64_t dz = -1; dz <= 1 && !blocked; ++dz)
      for (int64_t dy = -1; dy <= 1 && !blocked; ++dy)
        for (int64_t dx = -1; dx <= 1 && !blocked; ++dx) {
          auto it = cells.find(CellKey{key.x + dx, key.y + dy, key.z + dz});
          if (it == cells.end()) continue;
          for (int idx : it->second) {
            if ((points_[idx].position - p.position).squaredNorm() < sq) {
              blocked = true;
              break;
            }
          }
        }
    if (!blocked) {
      cells[key].push_back(static_cast<int>(points_.size()));
      points_.push_back(p);
    }
  }
}

std::size_t StrandSet::total_vertices() const {
  std::size_t n = 0;
  for (const Strand& s : strands) n += s.vertices.size();
  return n;
}

namespace {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Ericson, Real-Time Collision Detection, 5.1.5.
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + (c - b) * w;
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

Vec3 ScalpModel::closest_point(const Vec3& p, int* face_out) const {
  double best = std::numeric_limits<double>::infinity();
  Vec3 best_point = Vec3::Zero();
  int best_face = -1;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& tri = faces[f];
    const Vec3 q = closest_point_on_triangle(p, vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
    const double d = (q - p).squaredNorm();
    if (d < best) {
      best = d;
      best_point = q;
      best_face = static_cast<int>(f);
    }
  }
  if (face_out) *face_out = best_face;
  return best_point;
}

double ScalpModel::distance(const Vec3& p) const {
  if (faces.empty()) return std::numeric_limits<double>::infinity();
  return (closest_point(p) - p).norm();
}

Vec3 ScalpModel::face_normal(int face) const {
  const auto& tri = faces[face];
  const Vec3 n = (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
  const double len = n.norm();
  return len > 0 ? Vec3(n / len) : Vec3::UnitZ();
}

Vec3 ScalpModel::centroid() const {
  Vec3 c = Vec3::Zero();
  if (vertices.empty()) return c;
  for (const Vec3& v : vertices) c += v;
  return c / static_cast<double>(vertices.size());
}

}  // namespace hairrec
