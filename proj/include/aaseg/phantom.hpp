#ifndef AASEG_PHANTOM_HPP
#define AASEG_PHANTOM_HPP

#include <string>
#include <utility>
#include <vector>

#include "aaseg/volume.hpp"

namespace aaseg::phantom {

// Synthetic CTA-like scan: a wavy contrast-bright lumen inside an
// ellipsoidal aneurysm sac (the ground truth), plus a bright vertebra and a
// near-thrombus-intensity bowel confounder outside the sac. Post-stage
// phantoms carry two stent-graft lumen channels and bright speckle.
struct PhantomSpec {
  Dims3 dims{64, 64, 32};
  Vec3 spacing{1, 1, 1};

  // outer wall ellipsoid, semi-axes and center offset in voxels
  double semi_x = 12, semi_y = 12, semi_z = 10;
  double center_dx = 0, center_dy = 0, center_dz = 0;

  double lumen_radius = 3.5;   // voxels
  double waviness = 2.0;       // centerline sinusoid amplitude, voxels

  // intensity model (HU)
  double hu_lumen = 300;
  double hu_thrombus = 40;
  double hu_vertebra = 700;
  double hu_bowel = 30;  // within 15 HU of thrombus on purpose
  double hu_background = -50;
  double hu_stent = 1200;

  double noise_sigma = 10;
  bool with_confounders = true;
  bool post_stage = false;
  uint64_t seed = 0;
};

// pinned default used by the acceptance thresholds
PhantomSpec default_spec();
const char* default_spec_version();

std::pair<Volume3D, BinaryMask3D> generate_phantom(const PhantomSpec& spec);

struct CohortCase {
  std::string case_id;
  std::string stage;  // "pre" or "post"
  uint64_t seed = 0;
  Volume3D vol;
  BinaryMask3D mask;
};

// n phantoms with per-case randomized geometry and mixed pre/post stages
std::vector<CohortCase> generate_cohort(int n, const PhantomSpec& base,
                                        uint64_t seed);

// stable hash of every numeric field, recorded in cohort manifests
uint32_t spec_hash(const PhantomSpec& spec);

}  // namespace aaseg::phantom

#endif
