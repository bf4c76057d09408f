#include "aaseg/volio.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace aaseg::io {

namespace {

std::size_t element_size(ElementType t) {
  switch (t) {
    case ElementType::Short:
      return 2;
    case ElementType::UChar:
      return 1;
    case ElementType::Float:
      return 4;
  }
  return 0;
}

std::string type_name(ElementType t) {
  switch (t) {
    case ElementType::Short:
      return "MET_SHORT";
    case ElementType::UChar:
      return "MET_UCHAR";
    case ElementType::Float:
      return "MET_FLOAT";
  }
  return "";
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_header_text(std::ostream& os, const MetaImageHeader& h) {
  os << "ObjectType = Image\n";
  os << "NDims = 3\n";
  os << "DimSize = " << h.dim_size.nx << " " << h.dim_size.ny << " " << h.dim_size.nz
     << "\n";
  os << "ElementSpacing = " << format_double(h.element_spacing.x) << " "
     << format_double(h.element_spacing.y) << " " << format_double(h.element_spacing.z)
     << "\n";
  os << "Offset = " << format_double(h.offset.x) << " " << format_double(h.offset.y)
     << " " << format_double(h.offset.z) << "\n";
  os << "BinaryDataByteOrderMSB = False\n";
  os << "ElementType = " << type_name(h.element_type) << "\n";
  os << "ElementDataFile = " << h.element_data_file << "\n";
}

void write_pair(const MetaImageHeader& hdr_in, const std::vector<uint8_t>& payload,
                const std::string& path) {
  MetaImageHeader hdr = hdr_in;
  std::string raw_path;
  if (ends_with(path, ".mhd")) {
    raw_path = path.substr(0, path.size() - 4) + ".raw";
    hdr.element_data_file = fs::path(raw_path).filename().string();
  } else {
    hdr.element_data_file = "LOCAL";
  }

  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("write_metaimage: cannot open " + path);
  write_header_text(os, hdr);
  if (hdr.element_data_file == "LOCAL") {
    os.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size()));
  } else {
    std::ofstream raw(raw_path, std::ios::binary);
    if (!raw) throw Error("write_metaimage: cannot open " + raw_path);
    raw.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!raw) throw Error("write_metaimage: write failed for " + raw_path);
  }
  if (!os) throw Error("write_metaimage: write failed for " + path);
}

struct ParsedImage {
  MetaImageHeader header;
  std::vector<uint8_t> payload;
};

ParsedImage parse_metaimage(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("read_metaimage: cannot open " + path);

  ParsedImage img;
  MetaImageHeader& h = img.header;
  std::string line;
  std::streampos data_start = -1;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("read_metaimage: malformed header line: " + line);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    std::istringstream vs(val);
    if (key == "ObjectType") {
      // ignored (always Image)
    } else if (key == "NDims") {
      vs >> h.ndims;
      if (h.ndims != 3) throw Error("read_metaimage: NDims must be 3, got " + val);
    } else if (key == "DimSize") {
      vs >> h.dim_size.nx >> h.dim_size.ny >> h.dim_size.nz;
      if (!vs || h.dim_size.nx <= 0 || h.dim_size.ny <= 0 || h.dim_size.nz <= 0)
        throw Error("read_metaimage: invalid DimSize: " + val);
    } else if (key == "ElementSpacing") {
      vs >> h.element_spacing.x >> h.element_spacing.y >> h.element_spacing.z;
      if (!vs || h.element_spacing.x <= 0 || h.element_spacing.y <= 0 ||
          h.element_spacing.z <= 0)
        throw Error("read_metaimage: invalid ElementSpacing: " + val);
    } else if (key == "Offset") {
      vs >> h.offset.x >> h.offset.y >> h.offset.z;
    } else if (key == "BinaryDataByteOrderMSB") {
      h.byte_order_msb = (val == "True" || val == "true" || val == "1");
    } else if (key == "ElementType") {
      if (val == "MET_SHORT")
        h.element_type = ElementType::Short;
      else if (val == "MET_UCHAR")
        h.element_type = ElementType::UChar;
      else if (val == "MET_FLOAT")
        h.element_type = ElementType::Float;
      else
        throw Error("read_metaimage: unsupported ElementType: " + val);
    } else if (key == "ElementDataFile") {
      h.element_data_file = val;
      data_start = is.tellg();
      break;  // payload or nothing follows
    }
    // unknown keys ignored
  }
  if (data_start == std::streampos(-1))
    throw Error("read_metaimage: missing ElementDataFile in " + path);

  const std::size_t expected =
      h.dim_size.count() * element_size(h.element_type);
  if (h.element_data_file == "LOCAL") {
    is.seekg(0, std::ios::end);
    const std::size_t avail = static_cast<std::size_t>(is.tellg() - data_start);
    if (avail < expected)
      throw Error("read_metaimage: truncated LOCAL payload: expected " +
                  std::to_string(expected) + " bytes, found " + std::to_string(avail));
    img.payload.resize(expected);
    is.seekg(data_start);
    is.read(reinterpret_cast<char*>(img.payload.data()),
            static_cast<std::streamsize>(expected));
  } else {
    const fs::path raw_path = fs::path(path).parent_path() / h.element_data_file;
    std::ifstream raw(raw_path, std::ios::binary | std::ios::ate);
    if (!raw)
      throw Error("read_metaimage: ElementDataFile missing: " + raw_path.string());
    const std::size_t avail = static_cast<std::size_t>(raw.tellg());
    if (avail < expected)
      throw Error("read_metaimage: truncated payload in " + raw_path.string() +
                  ": expected " + std::to_string(expected) + " bytes, found " +
                  std::to_string(avail));
    img.payload.resize(expected);
    raw.seekg(0);
    raw.read(reinterpret_cast<char*>(img.payload.data()),
             static_cast<std::streamsize>(expected));
  }
  if (h.byte_order_msb) {
    const std::size_t es = element_size(h.element_type);
    for (std::size_t i = 0; i + es <= img.payload.size(); i += es)
      std::reverse(img.payload.begin() + static_cast<std::ptrdiff_t>(i),
                   img.payload.begin() + static_cast<std::ptrdiff_t>(i + es));
  }
  return img;
}

float element_as_float(const uint8_t* p, ElementType t) {
  switch (t) {
    case ElementType::Short: {
      int16_t v;
      std::memcpy(&v, p, 2);
      return static_cast<float>(v);
    }
    case ElementType::UChar:
      return static_cast<float>(*p);
    case ElementType::Float: {
      float v;
      std::memcpy(&v, p, 4);
      return v;
    }
  }
  return 0;
}

}  // namespace

void write_metaimage(const Volume3D& vol, const std::string& path) {
  if (vol.data.empty()) throw Error("write_metaimage: empty volume");
  MetaImageHeader h;
  h.dim_size = vol.dims;
  h.element_spacing = vol.spacing;
  h.offset = vol.origin;
  h.element_type = ElementType::Float;
  std::vector<uint8_t> payload(vol.data.size() * 4);
  std::memcpy(payload.data(), vol.data.data(), payload.size());
  write_pair(h, payload, path);
}

void write_metaimage(const BinaryMask3D& mask, const std::string& path) {
  if (mask.data.empty()) throw Error("write_metaimage: empty mask");
  MetaImageHeader h;
  h.dim_size = mask.dims;
  h.element_spacing = mask.spacing;
  h.offset = mask.origin;
  h.element_type = ElementType::UChar;
  std::vector<uint8_t> payload(mask.data.size());
  for (std::size_t i = 0; i < mask.data.size(); ++i)
    payload[i] = mask.data[i] ? 255 : 0;
  write_pair(h, payload, path);
}

Volume3D read_metaimage_volume(const std::string& path) {
  const ParsedImage img = parse_metaimage(path);
  const MetaImageHeader& h = img.header;
  Volume3D vol(h.dim_size, h.element_spacing, h.offset);
  const std::size_t es = element_size(h.element_type);
  for (std::size_t i = 0; i < vol.data.size(); ++i)
    vol.data[i] = element_as_float(&img.payload[i * es], h.element_type);
  return vol;
}

BinaryMask3D read_metaimage_mask(const std::string& path) {
  const ParsedImage img = parse_metaimage(path);
  const MetaImageHeader& h = img.header;
  BinaryMask3D mask(h.dim_size, h.element_spacing, h.offset);
  const std::size_t es = element_size(h.element_type);
  for (std::size_t i = 0; i < mask.data.size(); ++i)
    mask.data[i] =
        element_as_float(&img.payload[i * es], h.element_type) != 0.0f ? 1 : 0;
  return mask;
}

// ---------------------------------------------------------------------------
// checkpoint
// ---------------------------------------------------------------------------

uint32_t fnv1a32(const uint8_t* data, std::size_t n) {
  uint32_t h = 2166136261u;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 16777619u;
  }
  return h;
}

namespace {

constexpr char kMagic[8] = {'H', 'E', 'D', '3', 'D', 'S', 'G', '1'};
constexpr uint32_t kCheckpointVersion = 1;

void put_u32(std::vector<uint8_t>& buf, uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t get_u32(const std::vector<uint8_t>& buf, std::size_t& pos) {
  if (pos + 4 > buf.size()) throw Error("checkpoint: truncated file");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(buf[pos + i]) << (8 * i);
  pos += 4;
  return v;
}

}  // namespace

void write_checkpoint(const CheckpointData& ckpt, const std::string& path) {
  std::vector<uint8_t> payload;
  put_u32(payload, ckpt.version);
  put_u32(payload, static_cast<uint32_t>(ckpt.config.size()));
  payload.insert(payload.end(), ckpt.config.begin(), ckpt.config.end());
  put_u32(payload, static_cast<uint32_t>(ckpt.tensors.size()));
  for (const NamedTensor& t : ckpt.tensors) {
    put_u32(payload, static_cast<uint32_t>(t.name.size()));
    payload.insert(payload.end(), t.name.begin(), t.name.end());
    put_u32(payload, static_cast<uint32_t>(t.dims.size()));
    std::size_t n = 1;
    for (int64_t d : t.dims) {
      put_u32(payload, static_cast<uint32_t>(d));
      n *= static_cast<std::size_t>(d);
    }
    if (n != t.values.size())
      throw Error("checkpoint: tensor " + t.name + " dims do not match data size");
    const std::size_t off = payload.size();
    payload.resize(off + 4 * t.values.size());
    std::memcpy(payload.data() + off, t.values.data(), 4 * t.values.size());
  }

  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("checkpoint: cannot open " + path);
  os.write(kMagic, 8);
  os.write(reinterpret_cast<const char*>(payload.data()),
           static_cast<std::streamsize>(payload.size()));
  std::vector<uint8_t> crc;
  put_u32(crc, fnv1a32(payload.data(), payload.size()));
  os.write(reinterpret_cast<const char*>(crc.data()), 4);
  if (!os) throw Error("checkpoint: write failed for " + path);
}

CheckpointData read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  if (!is) throw Error("checkpoint: cannot open " + path);
  const auto size = static_cast<std::size_t>(is.tellg());
  if (size < 12) throw Error("checkpoint: truncated file");
  std::vector<uint8_t> buf(size);
  is.seekg(0);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));

  if (std::memcmp(buf.data(), kMagic, 8) != 0)
    throw Error("checkpoint: bad magic");
  const std::vector<uint8_t> payload(buf.begin() + 8, buf.end() - 4);
  std::size_t tail = size - 4;
  uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) stored |= static_cast<uint32_t>(buf[tail + i]) << (8 * i);
  if (stored != fnv1a32(payload.data(), payload.size()))
    throw Error("checkpoint: checksum mismatch");

  CheckpointData ckpt;
  std::size_t pos = 0;
  ckpt.version = get_u32(payload, pos);
  if (ckpt.version != kCheckpointVersion)
    throw Error("checkpoint: unsupported version " + std::to_string(ckpt.version));
  const uint32_t cfg_len = get_u32(payload, pos);
  if (pos + cfg_len > payload.size()) throw Error("checkpoint: truncated config");
  ckpt.config.assign(payload.begin() + static_cast<std::ptrdiff_t>(pos),
                     payload.begin() + static_cast<std::ptrdiff_t>(pos + cfg_len));
  pos += cfg_len;
  const uint32_t n_tensors = get_u32(payload, pos);
  for (uint32_t i = 0; i < n_tensors; ++i) {
    NamedTensor t;
    const uint32_t name_len = get_u32(payload, pos);
    if (pos + name_len > payload.size()) throw Error("checkpoint: truncated name");
    t.name.assign(payload.begin() + static_cast<std::ptrdiff_t>(pos),
                  payload.begin() + static_cast<std::ptrdiff_t>(pos + name_len));
    pos += name_len;
    const uint32_t rank = get_u32(payload, pos);
    std::size_t n = 1;
    for (uint32_t r = 0; r < rank; ++r) {
      const uint32_t d = get_u32(payload, pos);
      t.dims.push_back(d);
      n *= d;
    }
    if (pos + 4 * n > payload.size())
      throw Error("checkpoint: truncated tensor data for " + t.name);
    t.values.resize(n);
    std::memcpy(t.values.data(), payload.data() + pos, 4 * n);
    pos += 4 * n;
    for (const NamedTensor& prev : ckpt.tensors)
      if (prev.name == t.name)
        throw Error("checkpoint: duplicate tensor name " + t.name);
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

// ---------------------------------------------------------------------------
// CSV report
// ---------------------------------------------------------------------------

namespace {

struct Stat {
  double mean = 0, stddev = 0;  // population std
};

Stat stat_of(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  for (double x : xs) s.stddev += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(s.stddev / static_cast<double>(xs.size()));
  return s;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

}  // namespace

void write_report(const std::vector<metrics::MetricsReport>& rows,
                  const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("write_report: cannot open " + path);
  os << "# summary rows report population (not sample) standard deviation\n";
  os << "case_id,stage,dice,jaccard,max_diameter_mm,gt_max_diameter_mm,"
        "diameter_abs_err_mm,slice_index,gt_slice_index,volume_mm3,"
        "gt_volume_mm3,rel_vol_diff\n";

  std::vector<std::vector<double>> cols(10);
  for (const auto& r : rows) {
    os << r.case_id << ',' << r.stage << ',' << num(r.dice) << ',' << num(r.jaccard)
       << ',' << num(r.max_diameter_mm) << ',' << num(r.gt_max_diameter_mm) << ','
       << num(r.diameter_abs_err_mm) << ',' << r.slice_index << ','
       << r.gt_slice_index << ',' << num(r.volume_mm3) << ',' << num(r.gt_volume_mm3)
       << ',' << num(r.rel_vol_diff) << '\n';
    const double vals[10] = {r.dice,
                             r.jaccard,
                             r.max_diameter_mm,
                             r.gt_max_diameter_mm,
                             r.diameter_abs_err_mm,
                             static_cast<double>(r.slice_index),
                             static_cast<double>(r.gt_slice_index),
                             r.volume_mm3,
                             r.gt_volume_mm3,
                             r.rel_vol_diff};
    for (int i = 0; i < 10; ++i) cols[static_cast<std::size_t>(i)].push_back(vals[i]);
  }

  for (const char* label : {"mean", "std"}) {
    os << label << ',';
    for (const auto& col : cols) {
      const Stat s = stat_of(col);
      os << ',' << num(label[0] == 'm' ? s.mean : s.stddev);
    }
    os << '\n';
  }
  if (!os) throw Error("write_report: write failed for " + path);
}

}  // namespace aaseg::io
