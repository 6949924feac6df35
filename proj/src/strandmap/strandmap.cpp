#include "hairrec/strandmap/strandmap.hpp"

#include <cmath>

#include "hairrec/core/errors.hpp"

namespace hairrec::strandmap {

Vec2 encode_undirectional(double angle) { return {std::cos(2.0 * angle), std::sin(2.0 * angle)}; }

double decode_undirectional(const Vec2& enc) {
  double angle = 0.5 * std::atan2(enc.y(), enc.x());
  if (angle < 0.0) angle += kPi;
  if (angle >= kPi) angle -= kPi;
  return angle;
}

StrandMap::StrandMap(Image raster) : raster_(std::move(raster)) {
  if (raster_.channels() != 2) throw ValidationError("strand map raster must have 2 channels");
}

void StrandMap::set(int x, int y, double angle) {
  const Vec2 enc = encode_undirectional(angle);
  raster_.at(x, y, 0) = static_cast<float>(enc.x());
  raster_.at(x, y, 1) = static_cast<float>(enc.y());
}

std::vector<CameraView> fixed_view_rig(const Vec3& center, double radius, double focal, int width,
                                       int height) {
  if (radius <= 0.0 || focal <= 0.0) throw ValidationError("bad rig parameters");
  std::vector<CameraView> views;
  views.reserve(16);
  auto add = [&](double elevation_deg, double azimuth_deg) {
    const double el = deg2rad(elevation_deg), az = deg2rad(azimuth_deg);
    const Vec3 eye = center + radius * Vec3(std::cos(el) * std::cos(az),
                                            std::cos(el) * std::sin(az), std::sin(el));
    views.push_back(make_lookat_camera(eye, center, Vec3::UnitZ(), focal, focal, width, height));
  };
  for (int k = 0; k < 12; ++k) add(0.0, 30.0 * k);
  for (int k = 0; k < 4; ++k) add(35.0, 90.0 * k);
  return views;
}

StrandMapRender render_strand_map(const LineMap& map, const CameraView& view, double grow) {
  if (grow <= 0.0) throw ValidationError("grow length must be positive");
  StrandMapRender out{StrandMap(view.width, view.height), DepthMap(view.width, view.height)};

  for (const OrientedPoint& pt : map.points()) {
    auto a = view.project(pt.position - grow * pt.direction);
    auto b = view.project(pt.position + grow * pt.direction);
    if (!a || !b) continue;

    // Canonical endpoint order makes the rasterization independent of the
    // sign of the stored direction.
    if (std::tie(b->uv.x(), b->uv.y()) < std::tie(a->uv.x(), a->uv.y())) std::swap(a, b);
    const Vec2 d = b->uv - a->uv;
    if (d.norm() < 1e-12) continue;
    const double angle = std::atan2(d.y(), d.x());

    const int samples = std::max(2, static_cast<int>(std::ceil(2.0 * d.cwiseAbs().maxCoeff())) + 1);
    for (int k = 0; k < samples; ++k) {
      const double t = static_cast<double>(k) / (samples - 1);
      const Vec2 uv = a->uv + t * d;
      const int x = static_cast<int>(std::lround(uv.x()));
      const int y = static_cast<int>(std::lround(uv.y()));
      if (x < 0 || y < 0 || x >= view.width || y >= view.height) continue;
      const double depth = a->depth + t * (b->depth - a->depth);
      if (depth < out.depth.depth(x, y)) {
        out.depth.set(x, y, static_cast<float>(depth));
        out.map.set(x, y, angle);
      }
    }
  }
  return out;
}

namespace {

std::vector<StrandMapRender> render_impl(const LineMap& map, std::span<const CameraView> views,
                                         double grow, bool parallel) {
  std::vector<StrandMapRender> out;
  out.reserve(views.size());
  for (const CameraView& v : views) out.emplace_back(StrandMapRender{StrandMap(v.width, v.height), DepthMap(v.width, v.height)});
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int64_t i = 0; i < static_cast<int64_t>(views.size()); ++i)
    out[i] = render_strand_map(map, views[i], grow);
  return out;
}

}  // namespace

std::vector<StrandMapRender> render_strand_maps(const LineMap& map,
                                                std::span<const CameraView> views, double grow) {
  return render_impl(map, views, grow, true);
}

std::vector<StrandMapRender> render_strand_maps_serial(const LineMap& map,
                                                       std::span<const CameraView> views,
                                                       double grow) {
  return render_impl(map, views, grow, false);
}

}  // namespace hairrec::strandmap
