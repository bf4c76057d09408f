#ifndef AASEG_PREP_HPP
#define AASEG_PREP_HPP

#include <utility>
#include <vector>

#include "aaseg/rng.hpp"
#include "aaseg/volume.hpp"

namespace aaseg::prep {

// inclusive voxel bounds
struct RoiBounds {
  int x0 = 0, y0 = 0, z0 = 0;
  int x1 = 0, y1 = 0, z1 = 0;
};

// rotation about the z (axial) axis through the volume center, then
// translation in voxels
struct RigidTransform {
  double angle_deg = 0;
  double tx = 0, ty = 0, tz = 0;
};

struct AugmentPlan {
  int crops_per_scan = 4;
  int transforms_per_crop = 35;  // identity included
  double rot_range_deg = 10;
  double trans_range_vox = 10;
  Dims3 crop_dims{64, 64, 32};
  uint64_t seed = 0;
};

Volume3D crop_roi(const Volume3D& vol, const RoiBounds& b);
BinaryMask3D crop_roi(const BinaryMask3D& mask, const RoiBounds& b);

// clamp to [center-width/2, center+width/2], map linearly onto [0, 255]
Volume3D window_level(const Volume3D& vol, double center, double width);

// extent-preserving resample: output spacing = spacing * dims / target
Volume3D resample_trilinear(const Volume3D& vol, Dims3 target);
BinaryMask3D resample_nearest(const BinaryMask3D& mask, Dims3 target);

// uniform random crop whose bounds contain the whole mask bounding box
std::pair<Volume3D, BinaryMask3D> random_crop_containing(const Volume3D& vol,
                                                         const BinaryMask3D& mask,
                                                         Dims3 crop_dims, Rng& rng);

// image trilinear, mask nearest-neighbor, out-of-field = 0 / background
std::pair<Volume3D, BinaryMask3D> apply_rigid(const Volume3D& vol,
                                              const BinaryMask3D& mask,
                                              const RigidTransform& t);

// crops_per_scan x transforms_per_crop pairs; the first transform of each
// crop is the identity; deterministic under plan.seed
std::vector<std::pair<Volume3D, BinaryMask3D>> build_augmented_set(
    const Volume3D& vol, const BinaryMask3D& mask, const AugmentPlan& plan);

}  // namespace aaseg::prep

#endif
