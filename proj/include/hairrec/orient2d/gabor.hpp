#pragma once

#include <utility>
#include <vector>

#include "hairrec/core/image.hpp"

namespace hairrec::orient2d {

struct GaborBankConfig {
  int n_orientations = 180;
  double sigma_x = 1.8;   // across-strand, carrier axis
  double sigma_y = 2.4;   // along-strand
  double frequency = 0.25;  // cycles per pixel
  int kernel_size = 17;
};

// Oriented Gabor kernels, one per orientation step of pi/n. Kernel j peaks
// on ridges whose tangent angle is j*pi/n. Each kernel is zero-mean and
// L2-normalized.
class GaborBank {
 public:
  static GaborBank build(const GaborBankConfig& config);

  int size() const { return static_cast<int>(kernels_.size()); }
  int kernel_size() const { return config_.kernel_size; }
  double angle(int j) const;
  const std::vector<float>& kernel(int j) const { return kernels_[j]; }
  const GaborBankConfig& config() const { return config_; }

 private:
  GaborBankConfig config_;
  std::vector<std::vector<float>> kernels_;  // row-major k*k taps
};

// Per masked pixel: angle of the strongest |response| over the bank and a
// normalized peak-minus-mean confidence. Unmasked pixels keep the sentinel
// angle and zero confidence. mask is any single-channel raster, nonzero =
// hair. Reflect padding at borders. Rows run in parallel.
std::pair<OrientationMap, ConfidenceMap> extract_orientation(const Image& gray,
                                                             const GaborBank& bank,
                                                             const Image& mask);

// Serial reference for the OpenMP kernel above; identical output.
std::pair<OrientationMap, ConfidenceMap> extract_orientation_serial(const Image& gray,
                                                                    const GaborBank& bank,
                                                                    const Image& mask);

// Rec.709 luminance for 3-channel rasters; 1-channel input passes through.
Image to_luminance(const Image& image);

}  // namespace hairrec::orient2d
