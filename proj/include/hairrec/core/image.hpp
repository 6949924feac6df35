#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "hairrec/core/types.hpp"

namespace hairrec {

// Dense row-major float raster, 1 or 2 channels.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels = 1, float fill = 0.0f)
      : width_(width), height_(height), channels_(channels),
        data_(static_cast<std::size_t>(width) * height * channels, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  float& at(int x, int y, int c = 0) { return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c]; }
  float at(int x, int y, int c = 0) const { return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c]; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

 private:
  int width_ = 0, height_ = 0, channels_ = 1;
  std::vector<float> data_;
};

// Per-pixel 2D hair orientation in [0, pi) radians measured from the image
// x axis; pixels outside the hair mask hold kSentinel and must not be read.
class OrientationMap {
 public:
  static constexpr float kSentinel = -1.0f;

  OrientationMap() = default;
  OrientationMap(int width, int height) : raster_(width, height, 1, kSentinel) {}
  explicit OrientationMap(Image raster) : raster_(std::move(raster)) {}

  int width() const { return raster_.width(); }
  int height() const { return raster_.height(); }
  bool masked(int x, int y) const { return raster_.at(x, y) >= 0.0f; }
  float angle(int x, int y) const { return raster_.at(x, y); }
  void set(int x, int y, float angle) { raster_.at(x, y) = angle; }
  void clear(int x, int y) { raster_.at(x, y) = kSentinel; }

  const Image& raster() const { return raster_; }
  Image& raster() { return raster_; }

 private:
  Image raster_;
};

// Per-pixel nonnegative confidence of the estimated orientation.
class ConfidenceMap {
 public:
  ConfidenceMap() = default;
  ConfidenceMap(int width, int height, float fill = 0.0f) : raster_(width, height, 1, fill) {}
  explicit ConfidenceMap(Image raster) : raster_(std::move(raster)) {}

  int width() const { return raster_.width(); }
  int height() const { return raster_.height(); }
  float value(int x, int y) const { return raster_.at(x, y); }
  void set(int x, int y, float v) { raster_.at(x, y) = v; }

  const Image& raster() const { return raster_; }
  Image& raster() { return raster_; }

 private:
  Image raster_;
};

// Camera-space z per pixel in mm, +inf where no geometry projects.
class DepthMap {
 public:
  static constexpr float kEmpty = std::numeric_limits<float>::infinity();

  DepthMap() = default;
  DepthMap(int width, int height) : raster_(width, height, 1, kEmpty) {}
  explicit DepthMap(Image raster) : raster_(std::move(raster)) {}

  int width() const { return raster_.width(); }
  int height() const { return raster_.height(); }
  float depth(int x, int y) const { return raster_.at(x, y); }
  bool has_geometry(int x, int y) const { return std::isfinite(raster_.at(x, y)); }
  void set(int x, int y, float z) { raster_.at(x, y) = z; }

  const Image& raster() const { return raster_; }
  Image& raster() { return raster_; }

 private:
  Image raster_;
};

}  // namespace hairrec
