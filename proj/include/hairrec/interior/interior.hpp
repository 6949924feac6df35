#pragma once

#include <cstddef>

#include "hairrec/core/grid.hpp"
#include "hairrec/core/types.hpp"

namespace hairrec::interior {

struct InteriorConfig {
  int closing_radius = 3;         // voxels; morphological closing of the shell
  int diffusion_sweeps = 30;      // Jacobi passes over interior directions
  double max_open_fraction = 0.1; // tolerated fraction of uncovered scalp bins

  void validate() const;
};

// Sign-invariant L1 direction distance, averaged over components:
// min(|a - b|_1, |a + b|_1) / 3.
double sign_invariant_distance(const Vec3& a, const Vec3& b);

// Average oriented points into voxels. Directions falling into the same
// voxel are sign-aligned to the first arrival before averaging; points
// outside the grid are ignored.
OrientationGrid splat_linemap(const LineMap& map, const GridSpec& spec);

struct InteriorResult {
  OrientationGrid grid;           // exterior splat plus completed interior
  std::size_t exterior_voxels = 0;
  std::size_t interior_voxels = 0;
};

// Fill the space between the reconstructed hair shell and the scalp with a
// smooth direction field. The shell is the morphological closing of the
// exterior voxels; the region is grown from the scalp by flood fill, kept
// outside the fitted head sphere and radially under the shell. A shell
// leaving too much of the scalp uncovered is reported as an error with
// hole locations. Interior directions are seeded from the exterior voxels
// and a scalp-normal prior at root voxels, then relaxed by neighborhood
// averaging; exterior voxels are never modified.
InteriorResult complete_interior(const LineMap& map, const ScalpModel& scalp,
                                 const GridSpec& spec, const InteriorConfig& cfg = {});
InteriorResult complete_interior_serial(const LineMap& map, const ScalpModel& scalp,
                                        const GridSpec& spec, const InteriorConfig& cfg = {});

}  // namespace hairrec::interior
