#pragma once

#include <span>
#include <vector>

#include "hairrec/core/camera.hpp"
#include "hairrec/core/grid.hpp"
#include "hairrec/core/image.hpp"
#include "hairrec/core/types.hpp"

namespace hairrec::strandgen {

// Overlay exterior voxels on the completed interior field: exterior wins
// where both exist. When cameras and depth maps are given, interior-only
// voxels survive only if their center is invisible in every view.
OrientationGrid merge_geometry(const OrientationGrid& exterior, const OrientationGrid& interior,
                               std::span<const CameraView> views = {},
                               std::span<const DepthMap> depths = {}, double tau = 5.0);
OrientationGrid merge_geometry(const LineMap& map, const OrientationGrid& interior,
                               std::span<const CameraView> views = {},
                               std::span<const DepthMap> depths = {}, double tau = 5.0);

// One seed per occupied voxel whose coordinates are all multiples of
// `stride` (stratified subsample; stride 2 keeps 1/8).
std::vector<Eigen::Vector3i> stratified_seeds(const OrientationGrid& grid, int stride = 2);

// Bidirectional Euler integration through the direction field: from each
// seed walk x += h*d(x) forwards and backwards with trilinear, hemisphere
// aligned interpolation; stop on empty voxel, grid exit, a turn of 90
// degrees or more in one step, or `max_steps`. Polylines shorter than 3
// vertices are dropped. `step` <= 0 selects voxel_size / 2.
StrandSet trace_segments(const OrientationGrid& grid, std::span<const Eigen::Vector3i> seeds,
                         double step = 0.0, int max_steps = 10000);
StrandSet trace_segments_serial(const OrientationGrid& grid,
                                std::span<const Eigen::Vector3i> seeds, double step = 0.0,
                                int max_steps = 10000);

struct ConnectConfig {
  double chain_gap = 3.0;        // mm; max endpoint gap when chaining segments
  double chain_angle_deg = 30.0; // max sign-invariant end-tangent angle
  double root_distance = 15.0;   // mm; strand end close enough to the scalp to root
  double attach_distance = 5.0;  // mm; neighbor distance for sign disambiguation
  double graft_distance = 2.0;   // mm; distance for grafting onto a rooted strand
  double bridge_step = 1.0;      // mm; vertex spacing of inserted bridges

  void validate() const;
};

struct ConnectResult {
  StrandSet strands;
  std::size_t rooted = 0;    // first vertex snapped onto the scalp
  std::size_t attached = 0;  // grafted onto a rooted strand
  std::size_t unrooted = 0;  // leftovers
};

// Chain segments into long strands (mutually-nearest compatible ends), then
// iterate: root strands ending near the scalp (root end first, snapped onto
// the mesh), disambiguate growth direction of strands near rooted ones, and
// graft the remainder onto the closest rooted strand. Input segment order
// and direction signs do not affect the result: segments are canonicalized
// and sorted before processing, ties resolve to the lowest canonical index.
ConnectResult connect_strands(const StrandSet& segments, const ScalpModel& scalp,
                              const ConnectConfig& cfg = {});

}  // namespace hairrec::strandgen
