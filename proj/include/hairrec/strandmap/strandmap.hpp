#pragma once

#include <span>
#include <vector>

#include "hairrec/core/camera.hpp"
#include "hairrec/core/image.hpp"
#include "hairrec/core/types.hpp"

namespace hairrec::strandmap {

// Sign-free orientation encoding: angle -> (cos 2a, sin 2a). Unit-length on
// written pixels, (0, 0) elsewhere.
Vec2 encode_undirectional(double angle);
double decode_undirectional(const Vec2& enc);  // [0, pi)

class StrandMap {
 public:
  StrandMap(int width, int height) : raster_(width, height, 2) {}
  explicit StrandMap(Image raster);

  int width() const { return raster_.width(); }
  int height() const { return raster_.height(); }

  bool masked(int x, int y) const {
    return raster_.at(x, y, 0) != 0.0f || raster_.at(x, y, 1) != 0.0f;
  }
  void set(int x, int y, double angle);
  Vec2 encoded(int x, int y) const { return {raster_.at(x, y, 0), raster_.at(x, y, 1)}; }
  double angle(int x, int y) const { return decode_undirectional(encoded(x, y)); }

  const Image& raster() const { return raster_; }

 private:
  Image raster_;
};

// The fixed capture rig: a ring of 12 cameras at 0 elevation every 30
// degrees plus 4 at 35 degrees elevation every 90, all aimed at `center`.
std::vector<CameraView> fixed_view_rig(const Vec3& center, double radius = 600.0,
                                       double focal = 800.0, int width = 1280, int height = 720);

struct StrandMapRender {
  StrandMap map;
  DepthMap depth;
};

// Rasterize each oriented point as a short segment grown `grow` mm both
// ways along its direction; nearest depth wins per pixel. Flipping any
// input direction leaves the output bit-identical.
StrandMapRender render_strand_map(const LineMap& map, const CameraView& view, double grow = 2.0);

std::vector<StrandMapRender> render_strand_maps(const LineMap& map,
                                                std::span<const CameraView> views,
                                                double grow = 2.0);
std::vector<StrandMapRender> render_strand_maps_serial(const LineMap& map,
                                                       std::span<const CameraView> views,
                                                       double grow = 2.0);

}  // namespace hairrec::strandmap
