#include "hairrec/core/grid.hpp"

#include <cmath>

#include "hairrec/core/errors.hpp"

namespace hairrec {

OrientationGrid::OrientationGrid(const GridSpec& spec) : spec_(spec) {
  if (spec.dims.minCoeff() <= 0) throw ValidationError("grid dims must be positive");
  if (!(spec.voxel_size > 0)) throw ValidationError("grid voxel size must be positive");
  occ_.assign((spec.voxel_count() + 63) / 64, 0);
  block_dims_ = Eigen::Vector3i((spec.dims.x() + kBlockSize - 1) >> kBlockShift,
                                (spec.dims.y() + kBlockSize - 1) >> kBlockShift,
                                (spec.dims.z() + kBlockSize - 1) >> kBlockShift);
  blocks_.resize(static_cast<std::size_t>(block_dims_.x()) * block_dims_.y() * block_dims_.z());
}

Eigen::Vector3i OrientationGrid::from_linear(std::size_t idx) const {
  const int i = static_cast<int>(idx % spec_.dims.x());
  const int j = static_cast<int>((idx / spec_.dims.x()) % spec_.dims.y());
  const int k = static_cast<int>(idx / (static_cast<std::size_t>(spec_.dims.x()) * spec_.dims.y()));
  return {i, j, k};
}

Eigen::Vector3i OrientationGrid::containing_voxel(const Vec3& p) const {
  const Vec3 v = world_to_voxel(p);
  return {static_cast<int>(std::floor(v.x() + 0.5)),
          static_cast<int>(std::floor(v.y() + 0.5)),
          static_cast<int>(std::floor(v.z() + 0.5))};
}

std::size_t OrientationGrid::block_slot(int i, int j, int k) const {
  return (static_cast<std::size_t>(k >> kBlockShift) * block_dims_.y() + (j >> kBlockShift)) *
             block_dims_.x() +
         (i >> kBlockShift);
}

int OrientationGrid::block_offset(int i, int j, int k) const {
  const int bi = i & (kBlockSize - 1), bj = j & (kBlockSize - 1), bk = k & (kBlockSize - 1);
  return (bk * kBlockSize + bj) * kBlockSize + bi;
}

Vec3f OrientationGrid::direction(int i, int j, int k) const {
  const Block* b = blocks_[block_slot(i, j, k)].get();
  return b ? b->dirs[block_offset(i, j, k)] : Vec3f::Zero();
}

void OrientationGrid::set(int i, int j, int k, const Vec3f& dir) {
  const std::size_t idx = linear_index(i, j, k);
  uint64_t& word = occ_[idx >> 6];
  const uint64_t bit = uint64_t{1} << (idx & 63);
  if (!(word & bit)) {
    word |= bit;
    ++occupied_count_;
  }
  auto& slot = blocks_[block_slot(i, j, k)];
  if (!slot) slot = std::make_unique<Block>();
  // Occupied voxels always hold unit directions; normalize on entry so no
  // caller can break that invariant.
  const float n = dir.norm();
  slot->dirs[block_offset(i, j, k)] = n > 0.0f ? Vec3f(dir / n) : Vec3f(0.0f, 0.0f, 1.0f);
}

void OrientationGrid::clear(int i, int j, int k) {
  const std::size_t idx = linear_index(i, j, k);
  uint64_t& word = occ_[idx >> 6];
  const uint64_t bit = uint64_t{1} << (idx & 63);
  if (word & bit) {
    word &= ~bit;
    --occupied_count_;
  }
}

std::vector<std::size_t> OrientationGrid::occupied_indices() const {
  std::vector<std::size_t> out;
  out.reserve(occupied_count_);
  for (std::size_t w = 0; w < occ_.size(); ++w) {
    uint64_t word = occ_[w];
    while (word) {
      const int bit = __builtin_ctzll(word);
      out.push_back((w << 6) + bit);
      word &= word - 1;
    }
  }
  return out;
}

}  // namespace hairrec
