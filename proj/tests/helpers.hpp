#pragma once

// Shared fixtures for the unit tests: tiny cameras, synthetic rasters and
// temp-file plumbing. Header-only; include after doctest.h.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "hairrec/core/camera.hpp"
#include "hairrec/core/image.hpp"
#include "hairrec/core/types.hpp"

namespace hairrec::test {

// A camera at the world origin looking down +z with identity rotation, so
// camera space == world space. Pixel math is then easy to check by hand.
inline CameraView axis_camera(double fx = 1000.0, double fy = 1000.0, double cx = 640.0,
                              double cy = 360.0, int width = 1280, int height = 720) {
  CameraView view;
  view.fx = fx;
  view.fy = fy;
  view.cx = cx;
  view.cy = cy;
  view.width = width;
  view.height = height;
  return view;
}

// Sinusoidal grating whose ridges run along `angle` (tangent direction,
// radians from the image x axis). Values in [0, 1]. The cosine profile is
// even in the normal direction, so angles a and a+pi give identical pixels.
inline Image make_grating(int width, int height, double angle, double period_px = 4.0,
                          double noise_sigma = 0.0, uint32_t seed = 7) {
  Image img(width, height, 1);
  // Ridge tangent t = (cos a, sin a); intensity varies along the normal.
  const double nx = -std::sin(angle), ny = std::cos(angle);
  std::mt19937 gen(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double v = 0.5 + 0.5 * std::cos(2.0 * M_PI * (nx * x + ny * y) / period_px);
      if (noise_sigma > 0.0) v += noise(gen);
      img.at(x, y) = static_cast<float>(v);
    }
  return img;
}

inline Image full_mask(int width, int height) { return Image(width, height, 1, 1.0f); }

// Acute angle between undirected orientations, radians in [0, pi/2].
inline double orientation_diff(double a, double b) {
  double d = std::fmod(std::abs(a - b), M_PI);
  return std::min(d, M_PI - d);
}

// Unique temp path; removed in the destructor.
struct TempFile {
  std::filesystem::path path;

  explicit TempFile(const std::string& suffix) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("hairrec_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) +
            suffix);
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
  std::string str() const { return path.string(); }
};

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("hairrec_dir_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace hairrec::test
