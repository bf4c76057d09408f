#include "aaseg/phantom.hpp"

#include <cmath>
#include <sstream>

#include "aaseg/rng.hpp"
#include "aaseg/volio.hpp"

namespace aaseg::phantom {

namespace {

constexpr char kSpecVersion[] = "phantom-spec-v1";

struct Centerline {
  double cx, cy;       // base position
  double amp, phase;   // sinusoid in z
  double pos_x(double z, double nz) const {
    return cx + amp * std::sin(2 * M_PI * z / nz + phase);
  }
  double pos_y(double z, double nz) const {
    return cy + 0.5 * amp * std::cos(2 * M_PI * z / nz + phase);
  }
};

}  // namespace

PhantomSpec default_spec() { return PhantomSpec{}; }

const char* default_spec_version() { return kSpecVersion; }

uint32_t spec_hash(const PhantomSpec& s) {
  std::ostringstream os;
  os.precision(17);
  os << kSpecVersion << '|' << s.dims.nx << ',' << s.dims.ny << ',' << s.dims.nz
     << '|' << s.spacing.x << ',' << s.spacing.y << ',' << s.spacing.z << '|'
     << s.semi_x << ',' << s.semi_y << ',' << s.semi_z << '|' << s.center_dx << ','
     << s.center_dy << ',' << s.center_dz << '|' << s.lumen_radius << ','
     << s.waviness << '|' << s.hu_lumen << ',' << s.hu_thrombus << ','
     << s.hu_vertebra << ',' << s.hu_bowel << ',' << s.hu_background << ','
     << s.hu_stent << '|' << s.noise_sigma << '|' << s.with_confounders << '|'
     << s.post_stage;
  const std::string str = os.str();
  return io::fnv1a32(reinterpret_cast<const uint8_t*>(str.data()), str.size());
}

std::pair<Volume3D, BinaryMask3D> generate_phantom(const PhantomSpec& spec) {
  const double cx = (spec.dims.nx - 1) / 2.0 + spec.center_dx;
  const double cy = (spec.dims.ny - 1) / 2.0 + spec.center_dy;
  const double cz = (spec.dims.nz - 1) / 2.0 + spec.center_dz;

  // the lumen (with waviness) must stay inside the sac
  const double lumen_extent = spec.lumen_radius + spec.waviness;
  if (lumen_extent >= std::min({spec.semi_x, spec.semi_y}))
    throw Error("generate_phantom: lumen channel does not fit inside the sac");

  Rng rng(spec.seed);
  const double phase = rng.uniform(0, 2 * M_PI);

  std::vector<Centerline> lumens;
  if (spec.post_stage) {
    // two disjoint stent-graft limbs
    const double r = spec.lumen_radius * 0.7;
    const double sep = r + 1.5;
    lumens.push_back({cx - sep, cy, spec.waviness * 0.5, phase});
    lumens.push_back({cx + sep, cy, spec.waviness * 0.5, phase + M_PI});
  } else {
    lumens.push_back({cx, cy, spec.waviness, phase});
  }
  const double lumen_r = spec.post_stage ? spec.lumen_radius * 0.7 : spec.lumen_radius;

  // confounders sit outside the sac with a one-voxel clearance
  const double vert_r = 5.0;
  const double vert_cy = cy + spec.semi_y + 2.0 + vert_r;
  const double bowel_r = 5.0;
  const double bowel_cx = cx - spec.semi_x - 2.0 - bowel_r;
  const double bowel_cz = cz;

  Volume3D vol(spec.dims, spec.spacing, {0, 0, 0},
               static_cast<float>(spec.hu_background));
  BinaryMask3D mask(spec.dims, spec.spacing, {0, 0, 0}, false);

  for (int z = 0; z < spec.dims.nz; ++z)
    for (int y = 0; y < spec.dims.ny; ++y)
      for (int x = 0; x < spec.dims.nx; ++x) {
        const double ex = (x - cx) / spec.semi_x;
        const double ey = (y - cy) / spec.semi_y;
        const double ez = (z - cz) / spec.semi_z;
        double hu = spec.hu_background;
        if (ex * ex + ey * ey + ez * ez <= 1.0) {
          mask.at(x, y, z) = 1;
          hu = spec.hu_thrombus;
          for (const Centerline& cl : lumens) {
            const double dx = x - cl.pos_x(z, spec.dims.nz);
            const double dy = y - cl.pos_y(z, spec.dims.nz);
            const double d = std::hypot(dx, dy);
            if (d <= lumen_r) {
              hu = spec.hu_lumen;
            } else if (spec.post_stage && d <= lumen_r + 1.0) {
              // sparse bright stent speckle around each limb
              const uint64_t h = hash_mix(spec.seed, mask.index(x, y, z), 0x57E57ULL);
              if ((h & 3u) == 0) hu = spec.hu_stent;
            }
          }
        } else if (spec.with_confounders) {
          const double dvx = x - cx, dvy = y - vert_cy;
          if (std::hypot(dvx, dvy) <= vert_r) {
            hu = spec.hu_vertebra;
          } else {
            const double dbx = x - bowel_cx, dby = y - cy, dbz = z - bowel_cz;
            if (std::sqrt(dbx * dbx + dby * dby + dbz * dbz) <= bowel_r)
              hu = spec.hu_bowel;
          }
        }
        vol.at(x, y, z) = static_cast<float>(hu);
      }

  if (spec.noise_sigma > 0) {
    for (auto& v : vol.data)
      v = static_cast<float>(v + rng.normal(0, spec.noise_sigma));
  }
  return {std::move(vol), std::move(mask)};
}

std::vector<CohortCase> generate_cohort(int n, const PhantomSpec& base,
                                        uint64_t seed) {
  if (n < 1) throw Error("generate_cohort: n must be >= 1");
  std::vector<CohortCase> cohort;
  cohort.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng rng(hash_mix(seed, static_cast<uint64_t>(i), 0xC0407ULL));
    PhantomSpec s = base;
    s.semi_x = rng.uniform(9, 14);
    s.semi_y = rng.uniform(9, 14);
    s.semi_z = rng.uniform(8, 12);
    s.center_dx = rng.uniform(-3, 3);
    s.center_dy = rng.uniform(-3, 3);
    s.center_dz = rng.uniform(-2, 2);
    s.lumen_radius = rng.uniform(2.5, 4.0);
    s.waviness = rng.uniform(1.0, 2.5);
    s.post_stage = (i % 2 == 1);  // mixed stages, both always present for n >= 2
    s.seed = hash_mix(seed, static_cast<uint64_t>(i), 1);

    CohortCase c;
    {
      std::ostringstream id;
      id << "case" << (i < 10 ? "0" : "") << i;
      c.case_id = id.str();
    }
    c.stage = s.post_stage ? "post" : "pre";
    c.seed = s.seed;
    auto [vol, mask] = generate_phantom(s);
    c.vol = std::move(vol);
    c.mask = std::move(mask);
    cohort.push_back(std::move(c));
  }
  return cohort;
}

}  // namespace aaseg::phantom
