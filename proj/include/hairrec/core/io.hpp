#pragma once

#include <string>
#include <vector>

#include "hairrec/core/camera.hpp"
#include "hairrec/core/errors.hpp"
#include "hairrec/core/grid.hpp"
#include "hairrec/core/image.hpp"
#include "hairrec/core/types.hpp"

namespace hairrec {

// A point cloud with optional per-point directions (PLY nx,ny,nz reused as
// line direction).
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> directions;  // empty or same size as points

  bool has_directions() const { return !directions.empty(); }
};

// --- Strand binary format -------------------------------------------------
// Little-endian: u32 strand count, then per strand a u32 vertex count
// followed by f32 x,y,z triples. Rooted flags are not part of the format.
void save_strands(const std::string& path, const StrandSet& strands);
StrandSet load_strands(const std::string& path);

// --- Point clouds (PLY) ---------------------------------------------------
// ASCII or binary_little_endian PLY. Reads x,y,z and, when present,
// nx,ny,nz from the vertex element; writes binary_little_endian.
void save_ply(const std::string& path, const PointCloud& cloud, bool binary = true);
PointCloud load_ply(const std::string& path);

void save_linemap_ply(const std::string& path, const LineMap& map, bool binary = true);
LineMap load_linemap_ply(const std::string& path, double min_spacing = 0.5);

// --- Camera sets ----------------------------------------------------------
// Structured text: per view intrinsics (fx fy cx cy), a row-major 4x4
// world-to-camera matrix and the image size. Rotations are validated on load.
void save_cameras(const std::string& path, const std::vector<CameraView>& views);
std::vector<CameraView> load_cameras(const std::string& path);

// --- Pixel-field rasters --------------------------------------------------
// f32 binary with a 16-byte header: magic "HRRF", u32 width, u32 height,
// u32 channels.
void save_raster(const std::string& path, const Image& image);
Image load_raster(const std::string& path);

// Binary PGM/PPM (P5/P6, 8 or 16 bit). PPM is reduced to Rec.709 luminance;
// values are scaled to [0, 1].
Image load_pnm(const std::string& path);

// Loads .hrrf rasters or .pgm/.ppm images by extension.
Image load_image_any(const std::string& path);

// --- Orientation grids ----------------------------------------------------
// Header (magic "HRGD", dims, origin, voxel size), an occupancy bitmap and
// one f16 x,y,z triple per occupied voxel in linear-index order. Directions
// are sign-canonicalized before the f16 round.
void save_grid(const std::string& path, const OrientationGrid& grid);
OrientationGrid load_grid(const std::string& path);

// --- Scalp meshes (ASCII PLY with vertex/face, root sites as extra verts) --
void save_scalp(const std::string& path, const ScalpModel& scalp);
ScalpModel load_scalp(const std::string& path);

// IEEE 754 half-float conversion (round to nearest even).
uint16_t float_to_half(float f);
float half_to_float(uint16_t h);

}  // namespace hairrec
