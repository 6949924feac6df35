#pragma once

#include <optional>

#include "hairrec/core/types.hpp"

namespace hairrec {

struct PixelDepth {
  Vec2 uv;      // pixels
  double depth; // camera-space z, mm
};

// Pinhole camera with a world-to-camera rigid pose.
struct CameraView {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  Mat3 rotation = Mat3::Identity();   // world-to-camera
  Vec3 translation = Vec3::Zero();    // mm
  int width = 0, height = 0;

  Vec3 to_camera(const Vec3& p_world) const { return rotation * p_world + translation; }
  Vec3 to_world(const Vec3& p_cam) const { return rotation.transpose() * (p_cam - translation); }
  Vec3 center() const { return -(rotation.transpose() * translation); }

  // Points at or behind the camera plane yield nullopt, never NaN.
  std::optional<PixelDepth> project(const Vec3& p_world) const {
    const Vec3 pc = to_camera(p_world);
    if (pc.z() <= 0.0) return std::nullopt;
    return PixelDepth{{fx * pc.x() / pc.z() + cx, fy * pc.y() / pc.z() + cy}, pc.z()};
  }

  Vec3 backproject(const Vec2& uv, double depth) const {
    const Vec3 pc((uv.x() - cx) / fx * depth, (uv.y() - cy) / fy * depth, depth);
    return to_world(pc);
  }

  // Unit world direction of the viewing ray through a pixel.
  Vec3 ray_direction(const Vec2& uv) const {
    const Vec3 dc((uv.x() - cx) / fx, (uv.y() - cy) / fy, 1.0);
    return (rotation.transpose() * dc).normalized();
  }

  bool contains(const Vec2& uv, double margin = 0.0) const {
    return uv.x() >= margin && uv.y() >= margin &&
           uv.x() < width - margin && uv.y() < height - margin;
  }

  // Throws ValidationError when the rotation is not orthonormal
  // (|R^T R - I|_inf >= 1e-6) or intrinsics/dims are out of range.
  void validate() const;
};

// Simple look-at constructor: camera at `eye` looking toward `target`,
// `up` approximately up, +z forward, +y down in camera space (image
// y grows downward).
CameraView make_lookat_camera(const Vec3& eye, const Vec3& target, const Vec3& up,
                              double fx, double fy, int width, int height);

}  // namespace hairrec
