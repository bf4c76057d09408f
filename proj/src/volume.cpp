#include "aaseg/volume.hpp"

#include <cmath>
#include <numeric>

namespace aaseg {

static void check_geometry(const Dims3& d, const Vec3& sp) {
  if (d.nx <= 0 || d.ny <= 0 || d.nz <= 0)
    throw Error("volume dims must be positive");
  if (sp.x <= 0 || sp.y <= 0 || sp.z <= 0)
    throw Error("voxel spacing must be strictly positive");
}

Volume3D::Volume3D(Dims3 d, Vec3 sp, Vec3 org, float fill)
    : dims(d), spacing(sp), origin(org) {
  check_geometry(d, sp);
  data.assign(d.count(), fill);
}

BinaryMask3D::BinaryMask3D(Dims3 d, Vec3 sp, Vec3 org, bool fill)
    : dims(d), spacing(sp), origin(org) {
  check_geometry(d, sp);
  data.assign(d.count(), fill ? 1 : 0);
}

int64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), int64_t{0});
}

Tensor5 mask_to_tensor(const BinaryMask3D& mask) {
  Tensor5 t({1, 1, mask.dims.nz, mask.dims.ny, mask.dims.nx});
  // mask is x-fastest and the tensor is W-fastest with (D,H,W)=(z,y,x),
  // so the flat layouts coincide
  for (std::size_t i = 0; i < mask.data.size(); ++i)
    t.data[i] = mask.data[i] ? 1.0f : 0.0f;
  return t;
}

Tensor5 volume_to_tensor(const Volume3D& vol, float scale) {
  if (!(scale > 0)) throw Error("volume_to_tensor: scale must be positive");
  Tensor5 t({1, 1, vol.dims.nz, vol.dims.ny, vol.dims.nx});
  for (std::size_t i = 0; i < vol.data.size(); ++i) {
    if (!std::isfinite(vol.data[i]))
      throw Error("volume_to_tensor: non-finite voxel at flat index " +
                  std::to_string(i));
    t.data[i] = vol.data[i] / scale;
  }
  return t;
}

int64_t foreground_count(const BinaryMask3D& mask) {
  int64_t n = 0;
  for (uint8_t v : mask.data) n += (v != 0);
  return n;
}

double mask_volume_mm3(const BinaryMask3D& mask) {
  return static_cast<double>(foreground_count(mask)) * mask.voxel_volume_mm3();
}

Histogram make_histogram(const std::vector<float>& values, int bin_count,
                         double lower, double upper) {
  if (values.empty()) throw Error("histogram: empty input");
  if (bin_count < 2) throw Error("histogram: bin_count must be >= 2");
  if (!(upper > lower)) throw Error("histogram: upper must exceed lower");
  Histogram h;
  h.bin_count = bin_count;
  h.lower = lower;
  h.upper = upper;
  h.counts.assign(bin_count, 0);
  const double width = h.bin_width();
  for (float v : values) {
    auto b = static_cast<int64_t>(std::floor((v - lower) / width));
    if (b < 0) b = 0;
    if (b >= bin_count) b = bin_count - 1;
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

}  // namespace aaseg
