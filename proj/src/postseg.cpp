#include "aaseg/postseg.hpp"

#include <algorithm>
#include <cmath>

namespace aaseg::postseg {

double otsu_threshold(const Volume3D& prob) {
  const auto [mn, mx] = std::minmax_element(prob.data.begin(), prob.data.end());
  if (*mn == *mx)
    throw Error("otsu_threshold: constant input has no separable classes");

  constexpr int kBins = 256;
  std::vector<int64_t> counts(kBins, 0);
  for (float v : prob.data) {
    int b = static_cast<int>(std::floor(v * kBins));
    if (b < 0) b = 0;
    if (b >= kBins) b = kBins - 1;
    ++counts[static_cast<std::size_t>(b)];
  }

  const double total = static_cast<double>(prob.data.size());
  double sum_all = 0;
  for (int b = 0; b < kBins; ++b)
    sum_all += (b + 0.5) / kBins * static_cast<double>(counts[b]);

  double w0 = 0, sum0 = 0, best_var = -1.0;
  int best_cut = 0;
  for (int t = 0; t < kBins - 1; ++t) {
    const double c = static_cast<double>(counts[t]);
    w0 += c;
    sum0 += (t + 0.5) / kBins * c;
    const double w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double var = (w0 / total) * (w1 / total) * (mu0 - mu1) * (mu0 - mu1);
    if (var > best_var) {  // strict: ties keep the lowest cut
      best_var = var;
      best_cut = t;
    }
  }
  return static_cast<double>(best_cut + 1) / kBins;
}

BinaryMask3D binarize(const Volume3D& prob, double threshold) {
  if (threshold < 0 || threshold > 1)
    throw Error("binarize: threshold must be in [0,1]");
  BinaryMask3D m(prob.dims, prob.spacing, prob.origin, false);
  for (std::size_t i = 0; i < prob.data.size(); ++i)
    m.data[i] = prob.data[i] > threshold ? 1 : 0;
  return m;
}

ComponentLabeling label_components(const BinaryMask3D& mask) {
  const int nx = mask.dims.nx, ny = mask.dims.ny, nz = mask.dims.nz;
  ComponentLabeling cl;
  cl.labels.assign(mask.data.size(), 0);

  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.data.size(); ++start) {
    if (!mask.data[start] || cl.labels[start] != 0) continue;
    const int32_t label = ++cl.count;
    int64_t voxels = 0;
    stack.push_back(start);
    cl.labels[start] = label;
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      ++voxels;
      const int x = static_cast<int>(idx % nx);
      const int y = static_cast<int>((idx / nx) % ny);
      const int z = static_cast<int>(idx / (static_cast<std::size_t>(nx) * ny));
      for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0 && dz == 0) continue;
            const int xx = x + dx, yy = y + dy, zz = z + dz;
            if (xx < 0 || xx >= nx || yy < 0 || yy >= ny || zz < 0 || zz >= nz)
              continue;
            const std::size_t nidx = mask.index(xx, yy, zz);
            if (mask.data[nidx] && cl.labels[nidx] == 0) {
              cl.labels[nidx] = label;
              stack.push_back(nidx);
            }
          }
    }
    cl.voxel_counts.push_back(voxels);
  }
  return cl;
}

BinaryMask3D largest_component(const BinaryMask3D& mask) {
  const ComponentLabeling cl = label_components(mask);
  BinaryMask3D out(mask.dims, mask.spacing, mask.origin, false);
  if (cl.count == 0) return out;
  // labels are assigned in flat-scan order, so the first maximal count is
  // the component with the lowest minimal flat index
  int32_t best = 1;
  for (int32_t l = 2; l <= cl.count; ++l)
    if (cl.voxel_counts[static_cast<std::size_t>(l - 1)] >
        cl.voxel_counts[static_cast<std::size_t>(best - 1)])
      best = l;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = cl.labels[i] == best ? 1 : 0;
  return out;
}

}  // namespace aaseg::postseg
