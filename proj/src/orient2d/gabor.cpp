#include "hairrec/orient2d/gabor.hpp"

#include <cmath>

#include "hairrec/core/errors.hpp"
#include "hairrec/core/types.hpp"

namespace hairrec::orient2d {

GaborBank GaborBank::build(const GaborBankConfig& config) {
  if (config.kernel_size % 2 == 0) throw ValidationError("gabor kernel size must be odd");
  if (config.kernel_size < 3) throw ValidationError("gabor kernel size must be >= 3");
  if (!(config.sigma_x > 0) || !(config.sigma_y > 0)) throw ValidationError("gabor sigma must be positive");
  if (!(config.frequency > 0)) throw ValidationError("gabor frequency must be positive");
  if (config.n_orientations < 2) throw ValidationError("gabor bank needs >= 2 orientations");

  GaborBank bank;
  bank.config_ = config;
  bank.kernels_.resize(config.n_orientations);
  const int k = config.kernel_size;
  const int half = k / 2;
  for (int j = 0; j < config.n_orientations; ++j) {
    const double theta = j * kPi / config.n_orientations;
    const double c = std::cos(theta), s = std::sin(theta);
    std::vector<float>& taps = bank.kernels_[j];
    taps.resize(static_cast<std::size_t>(k) * k);
    double sum = 0.0;
    for (int v = -half; v <= half; ++v) {
      for (int u = -half; u <= half; ++u) {
        const double along = u * c + v * s;
        const double across = -u * s + v * c;
        const double env = std::exp(-0.5 * (across * across / (config.sigma_x * config.sigma_x) +
                                            along * along / (config.sigma_y * config.sigma_y)));
        const double tap = env * std::cos(2.0 * kPi * config.frequency * across);
        taps[(v + half) * k + (u + half)] = static_cast<float>(tap);
        sum += tap;
      }
    }
    const float mean = static_cast<float>(sum / (static_cast<double>(k) * k));
    double sq = 0.0;
    for (float& t : taps) {
      t -= mean;
      sq += static_cast<double>(t) * t;
    }
    const float inv_norm = sq > 0 ? static_cast<float>(1.0 / std::sqrt(sq)) : 1.0f;
    for (float& t : taps) t *= inv_norm;
  }
  return bank;
}

double GaborBank::angle(int j) const { return j * kPi / config_.n_orientations; }

namespace {

inline int reflect(int x, int n) {
  // reflect-101 style without the duplicated edge sample
  if (n == 1) return 0;
  while (x < 0 || x >= n) {
    if (x < 0) x = -x;
    if (x >= n) x = 2 * n - 2 - x;
  }
  return x;
}

void extract_rows(const Image& gray, const GaborBank& bank, const Image& mask,
                  OrientationMap& orient, ConfidenceMap& conf, bool parallel) {
  const int w = gray.width(), h = gray.height();
  const int k = bank.kernel_size();
  const int half = k / 2;
  const int n = bank.size();
  const double eps = 1e-12;
  // Peaks below this are float-rounding residue (zero-mean kernels are only
  // zero-mean to float precision), not oriented texture; the peak/mean ratio
  // would otherwise amplify them into bogus confidence. Oriented texture at
  // unit contrast responds at O(0.1..1).
  const double response_floor = 1e-4;

#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (int y = 0; y < h; ++y) {
    std::vector<float> patch(static_cast<std::size_t>(k) * k);
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y) == 0.0f) continue;
      for (int v = -half; v <= half; ++v) {
        const int yy = reflect(y + v, h);
        for (int u = -half; u <= half; ++u) {
          patch[(v + half) * k + (u + half)] = gray.at(reflect(x + u, w), yy);
        }
      }
      double best = -1.0, sum = 0.0;
      int best_j = 0;
      for (int j = 0; j < n; ++j) {
        const std::vector<float>& taps = bank.kernel(j);
        double r = 0.0;
        for (std::size_t t = 0; t < taps.size(); ++t) r += static_cast<double>(taps[t]) * patch[t];
        r = std::abs(r);
        sum += r;
        if (r > best) {
          best = r;
          best_j = j;
        }
      }
      const double mean = sum / n;
      const double c =
          best < response_floor ? 0.0 : std::max(0.0, (best - mean) / (best + eps));
      orient.set(x, y, static_cast<float>(bank.angle(best_j)));
      conf.set(x, y, static_cast<float>(c));
    }
  }
}

void check_dims(const Image& gray, const Image& mask) {
  if (gray.width() != mask.width() || gray.height() != mask.height()) {
    throw DimensionMismatchError("image and mask dimensions differ");
  }
  if (gray.channels() != 1) throw ValidationError("orientation extraction expects 1 channel");
  if (mask.channels() != 1) throw ValidationError("mask must be 1 channel");
}

}  // namespace

std::pair<OrientationMap, ConfidenceMap> extract_orientation(const Image& gray,
                                                             const GaborBank& bank,
                                                             const Image& mask) {
  check_dims(gray, mask);
  OrientationMap orient(gray.width(), gray.height());
  ConfidenceMap conf(gray.width(), gray.height());
  extract_rows(gray, bank, mask, orient, conf, true);
  return {std::move(orient), std::move(conf)};
}

std::pair<OrientationMap, ConfidenceMap> extract_orientation_serial(const Image& gray,
                                                                    const GaborBank& bank,
                                                                    const Image& mask) {
  check_dims(gray, mask);
  OrientationMap orient(gray.width(), gray.height());
  ConfidenceMap conf(gray.width(), gray.height());
  extract_rows(gray, bank, mask, orient, conf, false);
  return {std::move(orient), std::move(conf)};
}

Image to_luminance(const Image& image) {
  if (image.channels() == 1) return image;
  if (image.channels() != 3) throw ValidationError("luminance expects 1 or 3 channels");
  Image out(image.width(), image.height(), 1);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      out.at(x, y) = 0.2126f * image.at(x, y, 0) + 0.7152f * image.at(x, y, 1) +
                     0.0722f * image.at(x, y, 2);
    }
  }
  return out;
}

}  // namespace hairrec::orient2d
