#pragma once

#include <cstdint>

#include "sypa/synthgen.hpp"
#include "sypa/volume.hpp"

namespace sypa {

// Support radius of the signed-proximity ramp.
struct SignedProximityParams {
  double d_max_nm = 150.0;
};

// Union of all cleft voxels as one binary mask.
BinaryVolume cleft_mask_target(const SyntheticWorld& world);

// Signed distance ramp around clefts: magnitude 1 - d/d_max within d_max of
// the nearest cleft voxel, sign +1 toward that cleft's presynaptic partner,
// -1 toward the postsynaptic partner, 0 on ties / unrelated segments.
ScalarVolume signed_proximity_target(const SyntheticWorld& world,
                                     const SignedProximityParams& p);

// Patch-shaped binary masks of the true pre- and postsynaptic segments of one
// cleft (union over partners for polyadic edges). The patch is placed at
// spec.center; out-of-bounds voxels pad to background.
struct PartnerMasks {
  BinaryVolume pre;
  BinaryVolume post;
  Coord offset;  // volume coordinate of patch voxel (0,0,0)
};

PartnerMasks partner_mask_targets(const SyntheticWorld& world, std::uint32_t cleft_id,
                                  const PatchSpec& spec);

}  // namespace sypa
