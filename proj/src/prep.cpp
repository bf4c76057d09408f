#include "aaseg/prep.hpp"

#include <algorithm>
#include <cmath>

namespace aaseg::prep {

namespace {

void check_bounds(const RoiBounds& b, const Dims3& d) {
  if (b.x0 < 0 || b.y0 < 0 || b.z0 < 0 || b.x1 >= d.nx || b.y1 >= d.ny ||
      b.z1 >= d.nz || b.x0 > b.x1 || b.y0 > b.y1 || b.z0 > b.z1)
    throw Error("crop_roi: bounds out of range");
}

Vec3 shifted_origin(const Vec3& origin, const Vec3& spacing, const RoiBounds& b) {
  return {origin.x + b.x0 * spacing.x, origin.y + b.y0 * spacing.y,
          origin.z + b.z0 * spacing.z};
}

// trilinear sample with edge clamping; coordinates in source voxel units
float sample_trilinear(const Volume3D& v, double x, double y, double z) {
  const auto clampi = [](int i, int n) { return std::clamp(i, 0, n - 1); };
  const int x0 = clampi(static_cast<int>(std::floor(x)), v.dims.nx);
  const int y0 = clampi(static_cast<int>(std::floor(y)), v.dims.ny);
  const int z0 = clampi(static_cast<int>(std::floor(z)), v.dims.nz);
  const int x1 = clampi(x0 + 1, v.dims.nx);
  const int y1 = clampi(y0 + 1, v.dims.ny);
  const int z1 = clampi(z0 + 1, v.dims.nz);
  const double fx = std::clamp(x - x0, 0.0, 1.0);
  const double fy = std::clamp(y - y0, 0.0, 1.0);
  const double fz = std::clamp(z - z0, 0.0, 1.0);

  const double c00 = v.at(x0, y0, z0) * (1 - fx) + v.at(x1, y0, z0) * fx;
  const double c10 = v.at(x0, y1, z0) * (1 - fx) + v.at(x1, y1, z0) * fx;
  const double c01 = v.at(x0, y0, z1) * (1 - fx) + v.at(x1, y0, z1) * fx;
  const double c11 = v.at(x0, y1, z1) * (1 - fx) + v.at(x1, y1, z1) * fx;
  const double c0 = c00 * (1 - fy) + c10 * fy;
  const double c1 = c01 * (1 - fy) + c11 * fy;
  return static_cast<float>(c0 * (1 - fz) + c1 * fz);
}

struct BBox {
  int x0, y0, z0, x1, y1, z1;
  bool empty = true;
};

BBox mask_bbox(const BinaryMask3D& m) {
  BBox b{m.dims.nx, m.dims.ny, m.dims.nz, -1, -1, -1, true};
  for (int z = 0; z < m.dims.nz; ++z)
    for (int y = 0; y < m.dims.ny; ++y)
      for (int x = 0; x < m.dims.nx; ++x)
        if (m.at(x, y, z)) {
          b.empty = false;
          b.x0 = std::min(b.x0, x);
          b.y0 = std::min(b.y0, y);
          b.z0 = std::min(b.z0, z);
          b.x1 = std::max(b.x1, x);
          b.y1 = std::max(b.y1, y);
          b.z1 = std::max(b.z1, z);
        }
  return b;
}

}  // namespace

Volume3D crop_roi(const Volume3D& vol, const RoiBounds& b) {
  check_bounds(b, vol.dims);
  Volume3D out({b.x1 - b.x0 + 1, b.y1 - b.y0 + 1, b.z1 - b.z0 + 1}, vol.spacing,
               shifted_origin(vol.origin, vol.spacing, b));
  for (int z = 0; z < out.dims.nz; ++z)
    for (int y = 0; y < out.dims.ny; ++y)
      for (int x = 0; x < out.dims.nx; ++x)
        out.at(x, y, z) = vol.at(b.x0 + x, b.y0 + y, b.z0 + z);
  return out;
}

BinaryMask3D crop_roi(const BinaryMask3D& mask, const RoiBounds& b) {
  check_bounds(b, mask.dims);
  BinaryMask3D out({b.x1 - b.x0 + 1, b.y1 - b.y0 + 1, b.z1 - b.z0 + 1}, mask.spacing,
                   shifted_origin(mask.origin, mask.spacing, b));
  for (int z = 0; z < out.dims.nz; ++z)
    for (int y = 0; y < out.dims.ny; ++y)
      for (int x = 0; x < out.dims.nx; ++x)
        out.at(x, y, z) = mask.at(b.x0 + x, b.y0 + y, b.z0 + z) ? 1 : 0;
  return out;
}

Volume3D window_level(const Volume3D& vol, double center, double width) {
  if (!(width > 0)) throw Error("window_level: width must be positive");
  const double lo = center - width / 2;
  Volume3D out(vol.dims, vol.spacing, vol.origin);
  for (std::size_t i = 0; i < vol.data.size(); ++i) {
    const double v = std::clamp(static_cast<double>(vol.data[i]), lo, lo + width);
    out.data[i] = static_cast<float>(255.0 * (v - lo) / width);
  }
  return out;
}

Volume3D resample_trilinear(const Volume3D& vol, Dims3 target) {
  if (target.nx <= 0 || target.ny <= 0 || target.nz <= 0)
    throw Error("resample_trilinear: target dims must be positive");
  if (target == vol.dims) return vol;
  const double sx = static_cast<double>(vol.dims.nx) / target.nx;
  const double sy = static_cast<double>(vol.dims.ny) / target.ny;
  const double sz = static_cast<double>(vol.dims.nz) / target.nz;
  Volume3D out(target,
               {vol.spacing.x * sx, vol.spacing.y * sy, vol.spacing.z * sz},
               vol.origin);
  for (int z = 0; z < target.nz; ++z)
    for (int y = 0; y < target.ny; ++y)
      for (int x = 0; x < target.nx; ++x)
        out.at(x, y, z) = sample_trilinear(vol, (x + 0.5) * sx - 0.5,
                                           (y + 0.5) * sy - 0.5, (z + 0.5) * sz - 0.5);
  return out;
}

BinaryMask3D resample_nearest(const BinaryMask3D& mask, Dims3 target) {
  if (target.nx <= 0 || target.ny <= 0 || target.nz <= 0)
    throw Error("resample_nearest: target dims must be positive");
  if (target == mask.dims) return mask;
  const double sx = static_cast<double>(mask.dims.nx) / target.nx;
  const double sy = static_cast<double>(mask.dims.ny) / target.ny;
  const double sz = static_cast<double>(mask.dims.nz) / target.nz;
  BinaryMask3D out(target,
                   {mask.spacing.x * sx, mask.spacing.y * sy, mask.spacing.z * sz},
                   mask.origin);
  for (int z = 0; z < target.nz; ++z)
    for (int y = 0; y < target.ny; ++y)
      for (int x = 0; x < target.nx; ++x) {
        const int xs = std::clamp(
            static_cast<int>(std::lround((x + 0.5) * sx - 0.5)), 0, mask.dims.nx - 1);
        const int ys = std::clamp(
            static_cast<int>(std::lround((y + 0.5) * sy - 0.5)), 0, mask.dims.ny - 1);
        const int zs = std::clamp(
            static_cast<int>(std::lround((z + 0.5) * sz - 0.5)), 0, mask.dims.nz - 1);
        out.at(x, y, z) = mask.at(xs, ys, zs) ? 1 : 0;
      }
  return out;
}

std::pair<Volume3D, BinaryMask3D> random_crop_containing(const Volume3D& vol,
                                                         const BinaryMask3D& mask,
                                                         Dims3 crop_dims, Rng& rng) {
  if (!mask.same_geometry(vol)) throw Error("random_crop_containing: geometry mismatch");
  const BBox bb = mask_bbox(mask);
  if (bb.empty) throw Error("random_crop_containing: empty mask");
  if (bb.x1 - bb.x0 + 1 > crop_dims.nx || bb.y1 - bb.y0 + 1 > crop_dims.ny ||
      bb.z1 - bb.z0 + 1 > crop_dims.nz)
    throw Error("random_crop_containing: mask bounding box exceeds crop dims");
  if (crop_dims.nx > vol.dims.nx || crop_dims.ny > vol.dims.ny ||
      crop_dims.nz > vol.dims.nz)
    throw Error("random_crop_containing: crop dims exceed volume dims");

  // feasible offsets keep the crop inside the volume and the bbox inside the crop
  const auto pick = [&rng](int lo, int hi) {
    return static_cast<int>(rng.uniform_int(lo, hi));
  };
  const int ox = pick(std::max(0, bb.x1 + 1 - crop_dims.nx), std::min(bb.x0, vol.dims.nx - crop_dims.nx));
  const int oy = pick(std::max(0, bb.y1 + 1 - crop_dims.ny), std::min(bb.y0, vol.dims.ny - crop_dims.ny));
  const int oz = pick(std::max(0, bb.z1 + 1 - crop_dims.nz), std::min(bb.z0, vol.dims.nz - crop_dims.nz));

  RoiBounds b{ox, oy, oz, ox + crop_dims.nx - 1, oy + crop_dims.ny - 1,
              oz + crop_dims.nz - 1};
  return {crop_roi(vol, b), crop_roi(mask, b)};
}

std::pair<Volume3D, BinaryMask3D> apply_rigid(const Volume3D& vol,
                                              const BinaryMask3D& mask,
                                              const RigidTransform& t) {
  if (!mask.same_geometry(vol)) throw Error("apply_rigid: geometry mismatch");
  if (!std::isfinite(t.angle_deg)) throw Error("apply_rigid: non-finite angle");
  if (t.angle_deg == 0 && t.tx == 0 && t.ty == 0 && t.tz == 0) return {vol, mask};

  const double rad = t.angle_deg * M_PI / 180.0;
  const double ca = std::cos(rad), sa = std::sin(rad);
  const double cx = (vol.dims.nx - 1) / 2.0, cy = (vol.dims.ny - 1) / 2.0;

  Volume3D out_vol(vol.dims, vol.spacing, vol.origin, 0.0f);
  BinaryMask3D out_mask(mask.dims, mask.spacing, mask.origin, false);
  for (int z = 0; z < vol.dims.nz; ++z) {
    const double sz = z - t.tz;
    for (int y = 0; y < vol.dims.ny; ++y)
      for (int x = 0; x < vol.dims.nx; ++x) {
        // inverse map: undo translation, rotate by -angle about the center
        const double dx = x - t.tx - cx, dy = y - t.ty - cy;
        const double sx = ca * dx + sa * dy + cx;
        const double sy = -sa * dx + ca * dy + cy;
        if (sx < -0.5 || sx > vol.dims.nx - 0.5 || sy < -0.5 ||
            sy > vol.dims.ny - 0.5 || sz < -0.5 || sz > vol.dims.nz - 0.5)
          continue;  // out of field: background
        out_vol.at(x, y, z) = sample_trilinear(vol, sx, sy, sz);
        const int nxi = std::clamp(static_cast<int>(std::lround(sx)), 0, vol.dims.nx - 1);
        const int nyi = std::clamp(static_cast<int>(std::lround(sy)), 0, vol.dims.ny - 1);
        const int nzi = std::clamp(static_cast<int>(std::lround(sz)), 0, vol.dims.nz - 1);
        out_mask.at(x, y, z) = mask.at(nxi, nyi, nzi) ? 1 : 0;
      }
  }
  return {out_vol, out_mask};
}

std::vector<std::pair<Volume3D, BinaryMask3D>> build_augmented_set(
    const Volume3D& vol, const BinaryMask3D& mask, const AugmentPlan& plan) {
  if (plan.crops_per_scan < 1 || plan.transforms_per_crop < 1)
    throw Error("build_augmented_set: plan counts must be positive");
  std::vector<std::pair<Volume3D, BinaryMask3D>> out;
  out.reserve(static_cast<std::size_t>(plan.crops_per_scan) *
              static_cast<std::size_t>(plan.transforms_per_crop));
  for (int c = 0; c < plan.crops_per_scan; ++c) {
    Rng crop_rng(hash_mix(plan.seed, static_cast<uint64_t>(c), 0xC401u));
    auto [cvol, cmask] = random_crop_containing(vol, mask, plan.crop_dims, crop_rng);
    for (int k = 0; k < plan.transforms_per_crop; ++k) {
      if (k == 0) {
        out.emplace_back(cvol, cmask);  // identity
        continue;
      }
      Rng trng(hash_mix(plan.seed, static_cast<uint64_t>(c), static_cast<uint64_t>(k)));
      RigidTransform t;
      t.angle_deg = trng.uniform(-plan.rot_range_deg, plan.rot_range_deg);
      t.tx = trng.uniform(-plan.trans_range_vox, plan.trans_range_vox);
      t.ty = trng.uniform(-plan.trans_range_vox, plan.trans_range_vox);
      t.tz = trng.uniform(-plan.trans_range_vox, plan.trans_range_vox);
      out.push_back(apply_rigid(cvol, cmask, t));
    }
  }
  return out;
}

}  // namespace aaseg::prep
