#pragma once

#include <vector>

#include "hairrec/core/types.hpp"

namespace hairrec {

// Static median-split kd-tree over 3D points. Queries are const and safe to
// run from many threads at once. Ties are broken by point index so results
// do not depend on build details.
class KdTree3 {
 public:
  KdTree3() = default;
  explicit KdTree3(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  const Vec3& point(int i) const { return points_[i]; }

  // Index of the nearest point, -1 when empty. Squared distance optionally out.
  int nearest(const Vec3& q, double* sq_dist = nullptr) const;

  // Up to k nearest point indices, ascending by (distance, index).
  std::vector<int> knn(const Vec3& q, int k) const;

  // All indices within radius, ascending by index.
  std::vector<int> radius(const Vec3& q, double r) const;

 private:
  struct Node {
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf range into order_
    int axis = 0;
    double split = 0.0;
  };

  int build(int begin, int end);
  template <typename Visit>
  void search(int node, const Vec3& q, double& worst_sq, const Visit& visit) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;

  static constexpr int kLeafSize = 16;
};

}  // namespace hairrec
