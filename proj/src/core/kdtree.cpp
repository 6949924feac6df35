#include "hairrec/core/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hairrec {

KdTree3::KdTree3(std::vector<Vec3> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 4);
    root_ = build(0, static_cast<int>(points_.size()));
  }
}

int KdTree3::build(int begin, int end) {
  Node node;
  node.begin = begin;
  node.end = end;
  if (end - begin <= kLeafSize) {
    // Sorted leaves make tie-breaking by index natural.
    std::sort(order_.begin() + begin, order_.begin() + end);
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }

  Vec3 lo = points_[order_[begin]], hi = lo;
  for (int i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double va = points_[a][axis], vb = points_[b][axis];
                     return va < vb || (va == vb && a < b);
                   });
  node.axis = axis;
  node.split = points_[order_[mid]][axis];
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

template <typename Visit>
void KdTree3::search(int node_idx, const Vec3& q, double& worst_sq, const Visit& visit) const {
  const Node& node = nodes_[node_idx];
  if (node.left < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      visit(idx, (points_[idx] - q).squaredNorm());
    }
    return;
  }
  const double delta = q[node.axis] - node.split;
  const int near = delta < 0 ? node.left : node.right;
  const int far = delta < 0 ? node.right : node.left;
  search(near, q, worst_sq, visit);
  if (delta * delta <= worst_sq) search(far, q, worst_sq, visit);
}

int KdTree3::nearest(const Vec3& q, double* sq_dist) const {
  if (points_.empty()) return -1;
  double best = std::numeric_limits<double>::infinity();
  int best_idx = -1;
  search(root_, q, best, [&](int idx, double d) {
    if (d < best || (d == best && idx < best_idx)) {
      best = d;
      best_idx = idx;
    }
  });
  if (sq_dist) *sq_dist = best;
  return best_idx;
}

std::vector<int> KdTree3::knn(const Vec3& q, int k) const {
  std::vector<std::pair<double, int>> heap;  // max-heap on (dist, index)
  if (k <= 0 || points_.empty()) return {};
  heap.reserve(k + 1);
  double worst = std::numeric_limits<double>::infinity();
  search(root_, q, worst, [&](int idx, double d) {
    if (static_cast<int>(heap.size()) < k) {
      heap.emplace_back(d, idx);
      std::push_heap(heap.begin(), heap.end());
      if (static_cast<int>(heap.size()) == k) worst = heap.front().first;
    } else if (std::pair<double, int>(d, idx) < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = {d, idx};
      std::push_heap(heap.begin(), heap.end());
      worst = heap.front().first;
    }
  });
  std::sort_heap(heap.begin(), heap.end());
  std::vector<int> out(heap.size());
  for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].second;
  return out;
}

std::vector<int> KdTree3::radius(const Vec3& q, double r) const {
  std::vector<int> out;
  if (points_.empty()) return out;
  double worst = r * r;
  search(root_, q, worst, [&](int idx, double d) {
    if (d <= r * r) out.push_back(idx);
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hairrec
