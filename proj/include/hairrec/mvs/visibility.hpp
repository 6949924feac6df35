#pragma once

#include <span>
#include <vector>

#include "hairrec/core/camera.hpp"
#include "hairrec/core/image.hpp"

namespace hairrec::mvs {

inline constexpr double kDefaultTau = 5.0;  // mm

// Splat every point into the view as a square of half-width `splat_radius`
// pixels; each covered pixel keeps the minimum camera-space z. Pixels no
// point reaches stay +inf. Parallel over points with atomic per-pixel min;
// min is order independent, so output matches the serial reference exactly.
DepthMap render_depth(const CameraView& view, std::span<const Vec3> points, int splat_radius = 1);
DepthMap render_depth_serial(const CameraView& view, std::span<const Vec3> points,
                             int splat_radius = 1);

// Linear on-surface score: 1 - (p_z - D(pixel)) / tau, clamped to [0, 1].
// Points behind the camera or projecting outside the image score 0.
double visibility(const Vec3& p, const CameraView& view, const DepthMap& depth,
                  double tau = kDefaultTau);

// Interior means invisible in every view (V = 0 in all of them).
bool classify_interior(const Vec3& p, std::span<const CameraView> views,
                       std::span<const DepthMap> depths, double tau = kDefaultTau);

}  // namespace hairrec::mvs
