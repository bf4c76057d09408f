#ifndef AASEG_VOLIO_HPP
#define AASEG_VOLIO_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aaseg/metrics.hpp"
#include "aaseg/volume.hpp"

namespace aaseg::io {

enum class ElementType { Short, UChar, Float };

struct MetaImageHeader {
  int ndims = 3;
  Dims3 dim_size;
  Vec3 element_spacing{1, 1, 1};
  Vec3 offset{0, 0, 0};
  ElementType element_type = ElementType::Float;
  bool byte_order_msb = false;
  std::string element_data_file = "LOCAL";
};

// Volumes are written as MET_FLOAT, masks as MET_UCHAR {0,255}. A path
// ending in .mha stores the payload inline (LOCAL); .mhd writes a sibling
// .raw file.
void write_metaimage(const Volume3D& vol, const std::string& path);
void write_metaimage(const BinaryMask3D& mask, const std::string& path);

Volume3D read_metaimage_volume(const std::string& path);
// any nonzero element becomes foreground
BinaryMask3D read_metaimage_mask(const std::string& path);

// ---------------------------------------------------------------------------
// Checkpoint container: magic "HED3DSG1", u32 version, length-prefixed
// config string, named tensors, trailing FNV-1a checksum of the payload.
// All integers and floats little-endian.
// ---------------------------------------------------------------------------

struct NamedTensor {
  std::string name;
  std::vector<int64_t> dims;
  std::vector<float> values;
};

struct CheckpointData {
  uint32_t version = 1;
  std::string config;  // architecture config, JSON
  std::vector<NamedTensor> tensors;
};

void write_checkpoint(const CheckpointData& ckpt, const std::string& path);
CheckpointData read_checkpoint(const std::string& path);

uint32_t fnv1a32(const uint8_t* data, std::size_t n);

// ---------------------------------------------------------------------------
// Metric report CSV: fixed column set, one row per case plus population
// mean/std summary rows.
// ---------------------------------------------------------------------------

void write_report(const std::vector<metrics::MetricsReport>& rows,
                  const std::string& path);

}  // namespace aaseg::io

#endif
