#include "hairrec/mvs/visibility.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>

#include "hairrec/core/errors.hpp"

namespace hairrec::mvs {

namespace {

// Bit pattern of a nonnegative float orders like the float itself, so a
// CAS min on the uint32 view is an exact depth test.
inline uint32_t depth_bits(float z) {
  uint32_t b;
  std::memcpy(&b, &z, 4);
  return b;
}

inline float bits_depth(uint32_t b) {
  float z;
  std::memcpy(&z, &b, 4);
  return z;
}

struct Splat {
  int x0, x1, y0, y1;
  float z;
  bool valid;
};

inline Splat splat_of(const CameraView& view, const Vec3& p, int r) {
  const auto proj = view.project(p);
  if (!proj) return {0, 0, 0, 0, 0.0f, false};
  const int px = static_cast<int>(std::lround(proj->uv.x()));
  const int py = static_cast<int>(std::lround(proj->uv.y()));
  Splat s;
  s.x0 = std::max(px - r, 0);
  s.x1 = std::min(px + r, view.width - 1);
  s.y0 = std::max(py - r, 0);
  s.y1 = std::min(py + r, view.height - 1);
  s.z = static_cast<float>(proj->depth);
  s.valid = s.x0 <= s.x1 && s.y0 <= s.y1;
  return s;
}

}  // namespace

DepthMap render_depth_serial(const CameraView& view, std::span<const Vec3> points,
                             int splat_radius) {
  DepthMap depth(view.width, view.height);
  for (const Vec3& p : points) {
    const Splat s = splat_of(view, p, splat_radius);
    if (!s.valid) continue;
    for (int y = s.y0; y <= s.y1; ++y)
      for (int x = s.x0; x <= s.x1; ++x)
        depth.set(x, y, std::min(depth.depth(x, y), s.z));
  }
  return depth;
}

DepthMap render_depth(const CameraView& view, std::span<const Vec3> points, int splat_radius) {
  DepthMap depth(view.width, view.height);
  const std::size_t n_px = depth.raster().data().size();
  std::vector<std::atomic<uint32_t>> bits(n_px);
  const uint32_t inf_bits = depth_bits(DepthMap::kEmpty);
  for (auto& b : bits) b.store(inf_bits, std::memory_order_relaxed);

  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Splat s = splat_of(view, points[i], splat_radius);
    if (!s.valid) continue;
    const uint32_t zb = depth_bits(s.z);
    for (int y = s.y0; y <= s.y1; ++y) {
      for (int x = s.x0; x <= s.x1; ++x) {
        std::atomic<uint32_t>& cell = bits[static_cast<std::size_t>(y) * view.width + x];
        uint32_t cur = cell.load(std::memory_order_relaxed);
        while (zb < cur && !cell.compare_exchange_weak(cur, zb, std::memory_order_relaxed)) {
        }
      }
    }
  }

  float* out = depth.raster().data().data();
  for (std::size_t i = 0; i < n_px; ++i) out[i] = bits_depth(bits[i].load(std::memory_order_relaxed));
  return depth;
}

double visibility(const Vec3& p, const CameraView& view, const DepthMap& depth, double tau) {
  if (!(tau > 0)) throw ValidationError("visibility tau must be positive");
  const auto proj = view.project(p);
  if (!proj) return 0.0;
  const int x = static_cast<int>(std::lround(proj->uv.x()));
  const int y = static_cast<int>(std::lround(proj->uv.y()));
  if (!depth.raster().contains(x, y)) return 0.0;
  const double v = 1.0 - (proj->depth - depth.depth(x, y)) / tau;
  return std::clamp(v, 0.0, 1.0);
}

bool classify_interior(const Vec3& p, std::span<const CameraView> views,
                       std::span<const DepthMap> depths, double tau) {
  if (views.size() != depths.size()) throw DimensionMismatchError("views/depths count mismatch");
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (visibility(p, views[i], depths[i], tau) > 0.0) return false;
  }
  return true;
}

}  // namespace hairrec::mvs
