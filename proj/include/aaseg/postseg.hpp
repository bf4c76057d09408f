#ifndef AASEG_POSTSEG_HPP
#define AASEG_POSTSEG_HPP

#include <cstdint>
#include <vector>

#include "aaseg/volume.hpp"

namespace aaseg::postseg {

struct ComponentLabeling {
  std::vector<int32_t> labels;      // 0 = background, components 1..count
  int32_t count = 0;
  std::vector<int64_t> voxel_counts;  // indexed by label-1
};

// Otsu threshold over a 256-bin histogram of [0,1]; returns the upper edge
// of the chosen bin. Ties break to the lowest threshold. Throws when the
// input is constant.
double otsu_threshold(const Volume3D& prob);

// voxel is foreground iff p > threshold (strict)
BinaryMask3D binarize(const Volume3D& prob, double threshold);

// 26-connectivity labeling in flat-index scan order
ComponentLabeling label_components(const BinaryMask3D& mask);

// keeps only the component with the most voxels; ties break to the
// component with the lowest minimal flat index. Empty in, empty out.
BinaryMask3D largest_component(const BinaryMask3D& mask);

}  // namespace aaseg::postseg

#endif
