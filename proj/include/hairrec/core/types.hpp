#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <vector>

namespace hairrec {

// World units are millimeters throughout. Angles are radians internally;
// degrees appear only at CLI/report boundaries.
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec3f = Eigen::Vector3f;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// A 3D point carrying a sign-ambiguous unit direction (d and -d are the
// same line). Every consumer must treat both signs identically.
struct OrientedPoint {
  Vec3 position = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
};

// Canonical sign for serialization only: first component with magnitude
// above eps is made positive. Consumers never rely on the sign.
Vec3 canonical_direction(const Vec3& d, double eps = 1e-6);

// Acute angle between two sign-ambiguous unit directions, in [0, pi/2].
double line_angle(const Vec3& a, const Vec3& b);

// Acute difference between two 2D orientations in [0, pi), result in [0, pi/2].
double orientation_diff(double a, double b);

// Exterior hair representation: a deduplicated set of oriented points.
// Construction drops any point closer than `min_spacing` to an already
// accepted one (first occurrence wins, input order preserved).
class LineMap {
 public:
  LineMap() = default;
  explicit LineMap(std::vector<OrientedPoint> points, double min_spacing = 0.5);

  const std::vector<OrientedPoint>& points() const { return points_; }
  double min_spacing() const { return min_spacing_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<OrientedPoint> points_;
  double min_spacing_ = 0.5;
};

struct Strand {
  std::vector<Vec3> vertices;
  bool rooted = false;
};

struct StrandSet {
  std::vector<Strand> strands;

  std::size_t size() const { return strands.size(); }
  bool empty() const { return strands.empty(); }
  std::size_t total_vertices() const;
};

struct ScalpModel {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Vec3> root_sites;

  // Closest point on the triangle mesh; `face_out` receives the face index.
  Vec3 closest_point(const Vec3& p, int* face_out = nullptr) const;
  double distance(const Vec3& p) const;
  Vec3 face_normal(int face) const;
  Vec3 centroid() const;
};

}  // namespace hairrec
