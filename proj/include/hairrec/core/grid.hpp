#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "hairrec/core/types.hpp"

namespace hairrec {

struct GridSpec {
  Eigen::Vector3i dims{512, 512, 384};
  Vec3 origin = Vec3::Zero();  // world position of voxel (0,0,0) center, mm
  double voxel_size = 1.0;     // mm

  bool operator==(const GridSpec& o) const {
    return dims == o.dims && origin == o.origin && voxel_size == o.voxel_size;
  }
  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims.x()) * dims.y() * dims.z();
  }
};

// Dense voxel occupancy plus a sign-ambiguous unit direction per occupied
// voxel. Occupancy is a bitmap; directions live in 8^3 blocks allocated on
// demand so the default 512x512x384 spec stays affordable.
class OrientationGrid {
 public:
  OrientationGrid() = default;
  explicit OrientationGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  const Eigen::Vector3i& dims() const { return spec_.dims; }
  double voxel_size() const { return spec_.voxel_size; }

  bool in_bounds(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 &&
           i < spec_.dims.x() && j < spec_.dims.y() && k < spec_.dims.z();
  }

  std::size_t linear_index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * spec_.dims.y() + j) * spec_.dims.x() + i;
  }
  Eigen::Vector3i from_linear(std::size_t idx) const;

  Vec3 voxel_center(int i, int j, int k) const {
    return spec_.origin + spec_.voxel_size * Vec3(i, j, k);
  }
  // Continuous voxel coordinates of a world point (voxel centers at integers).
  Vec3 world_to_voxel(const Vec3& p) const { return (p - spec_.origin) / spec_.voxel_size; }
  Eigen::Vector3i containing_voxel(const Vec3& p) const;

  bool occupied(int i, int j, int k) const {
    const std::size_t idx = linear_index(i, j, k);
    return (occ_[idx >> 6] >> (idx & 63)) & 1;
  }
  Vec3f direction(int i, int j, int k) const;
  void set(int i, int j, int k, const Vec3f& dir);
  void clear(int i, int j, int k);

  std::size_t occupied_count() const { return occupied_count_; }
  // Linear indices of all occupied voxels in ascending order.
  std::vector<std::size_t> occupied_indices() const;

 private:
  static constexpr int kBlockShift = 3;  // 8^3 voxel blocks
  static constexpr int kBlockSize = 1 << kBlockShift;
  static constexpr int kBlockVoxels = kBlockSize * kBlockSize * kBlockSize;
  struct Block {
    Vec3f dirs[kBlockVoxels];
  };

  std::size_t block_slot(int i, int j, int k) const;
  int block_offset(int i, int j, int k) const;

  GridSpec spec_;
  Eigen::Vector3i block_dims_ = Eigen::Vector3i::Zero();
  std::vector<uint64_t> occ_;
  std::vector<std::unique_ptr<Block>> blocks_;
  std::size_t occupied_count_ = 0;
};

}  // namespace hairrec
