#ifndef AASEG_VOLUME_HPP
#define AASEG_VOLUME_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace aaseg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Dims3 {
  int nx = 0, ny = 0, nz = 0;
  bool operator==(const Dims3&) const = default;
  std::size_t count() const {
    return static_cast<std::size_t>(nx) * ny * nz;
  }
};

struct Vec3 {
  double x = 0, y = 0, z = 0;
  bool operator==(const Vec3&) const = default;
};

// Scalar 3D grid with physical spacing (mm/voxel) and origin (mm).
// Storage is x-fastest: flat index = x + nx*(y + ny*z).
struct Volume3D {
  Dims3 dims{};
  Vec3 spacing{1, 1, 1};
  Vec3 origin{0, 0, 0};
  std::vector<float> data;

  Volume3D() = default;
  Volume3D(Dims3 d, Vec3 sp, Vec3 org, float fill = 0.0f);

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims.nx) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims.ny) * static_cast<std::size_t>(z));
  }
  float& at(int x, int y, int z) { return data[index(x, y, z)]; }
  float at(int x, int y, int z) const { return data[index(x, y, z)]; }

  double voxel_volume_mm3() const { return spacing.x * spacing.y * spacing.z; }
  bool same_geometry(const Volume3D& o) const {
    return dims == o.dims && spacing == o.spacing && origin == o.origin;
  }
};

// Boolean grid sharing Volume3D geometry.
struct BinaryMask3D {
  Dims3 dims{};
  Vec3 spacing{1, 1, 1};
  Vec3 origin{0, 0, 0};
  std::vector<uint8_t> data;  // 0 or 1

  BinaryMask3D() = default;
  BinaryMask3D(Dims3 d, Vec3 sp, Vec3 org, bool fill = false);

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims.nx) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims.ny) * static_cast<std::size_t>(z));
  }
  uint8_t& at(int x, int y, int z) { return data[index(x, y, z)]; }
  bool at(int x, int y, int z) const { return data[index(x, y, z)] != 0; }

  double voxel_volume_mm3() const { return spacing.x * spacing.y * spacing.z; }
  bool same_geometry(const BinaryMask3D& o) const {
    return dims == o.dims && spacing == o.spacing && origin == o.origin;
  }
  bool same_geometry(const Volume3D& o) const {
    return dims == o.dims && spacing == o.spacing && origin == o.origin;
  }
};

// Dense rank-5 tensor (N, C, D, H, W), W-fastest.
template <typename T>
struct TensorT {
  std::array<int64_t, 5> shape{0, 0, 0, 0, 0};
  std::vector<T> data;

  TensorT() = default;
  explicit TensorT(std::array<int64_t, 5> s, T fill = T(0)) : shape(s) {
    for (auto d : s)
      if (d < 0) throw Error("tensor dimension must be non-negative");
    data.assign(static_cast<std::size_t>(numel()), fill);
  }

  int64_t numel() const {
    return shape[0] * shape[1] * shape[2] * shape[3] * shape[4];
  }
  std::size_t index(int64_t n, int64_t c, int64_t d, int64_t h, int64_t w) const {
    return static_cast<std::size_t>(
        (((n * shape[1] + c) * shape[2] + d) * shape[3] + h) * shape[4] + w);
  }
  T& at(int64_t n, int64_t c, int64_t d, int64_t h, int64_t w) {
    return data[index(n, c, d, h, w)];
  }
  T at(int64_t n, int64_t c, int64_t d, int64_t h, int64_t w) const {
    return data[index(n, c, d, h, w)];
  }
  bool same_shape(const TensorT& o) const { return shape == o.shape; }
};

using Tensor5 = TensorT<float>;
using Tensor5d = TensorT<double>;

struct Histogram {
  int bin_count = 0;
  double lower = 0, upper = 0;
  std::vector<int64_t> counts;

  double bin_width() const { return (upper - lower) / bin_count; }
  int64_t total() const;
};

// --- volcore operations ---

Tensor5 mask_to_tensor(const BinaryMask3D& mask);
Tensor5 volume_to_tensor(const Volume3D& vol, float scale);
int64_t foreground_count(const BinaryMask3D& mask);
double mask_volume_mm3(const BinaryMask3D& mask);

// value v lands in bin floor((v-lower)/width), clamped to [0, bin_count-1]
Histogram make_histogram(const std::vector<float>& values, int bin_count,
                         double lower, double upper);

}  // namespace aaseg

#endif
