#include "cloudseg/raster.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cloudseg::io {

namespace {

constexpr std::array<BandInfo, 11> kBandTable = {{
    {BandId::ultra_blue, "ultra_blue", 0.435, 0.451},
    {BandId::blue, "blue", 0.452, 0.512},
    {BandId::green, "green", 0.533, 0.590},
    {BandId::red, "red", 0.636, 0.673},
    {BandId::nir, "nir", 0.851, 0.879},
    {BandId::swir1, "swir1", 1.566, 1.651},
    {BandId::swir2, "swir2", 2.107, 2.294},
    {BandId::panchromatic, "panchromatic", 0.503, 0.676},
    {BandId::cirrus, "cirrus", 1.363, 1.384},
    {BandId::tirs1, "tirs1", 10.60, 11.19},
    {BandId::tirs2, "tirs2", 11.50, 12.51},
}};

std::string read_file(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << file.rdbuf();
  return std::move(buf).str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw IoError("write failed for " + path.string());
}

struct RasterHeader {
  int width = 0;
  int height = 0;
  int band = 0;
  std::size_t payload_offset = 0;
};

RasterHeader parse_raster_header(const std::string& bytes, const fs::path& path) {
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string::npos || eol > 64)
    throw FormatError(path.string() + ": missing raster header line");
  const std::string line = bytes.substr(0, eol);
  std::istringstream in(line);
  std::string tag;
  RasterHeader header;
  if (!(in >> tag >> header.width >> header.height >> header.band) || tag != "CSR1")
    throw FormatError(path.string() + ": bad raster header '" + line + "'");
  std::string extra;
  if (in >> extra) throw FormatError(path.string() + ": trailing header fields");
  if (header.width <= 0 || header.height <= 0)
    throw FormatError(path.string() + ": non-positive raster dimensions");
  if (header.band < 0 || header.band > 12)
    throw FormatError(path.string() + ": band id out of range");
  header.payload_offset = eol + 1;
  return header;
}

std::vector<std::uint16_t> parse_samples(const std::string& bytes, std::size_t offset,
                                         std::size_t count, const fs::path& path) {
  const std::size_t need = count * 2;
  if (bytes.size() - offset < need)
    throw LengthError(path.string() + ": payload shorter than header advertises");
  if (bytes.size() - offset > need)
    throw LengthError(path.string() + ": payload longer than header advertises");
  std::vector<std::uint16_t> samples(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto lo = static_cast<unsigned char>(bytes[offset + 2 * i]);
    const auto hi = static_cast<unsigned char>(bytes[offset + 2 * i + 1]);
    samples[i] = static_cast<std::uint16_t>(lo | (hi << 8));
  }
  return samples;
}

std::string raster_bytes(int width, int height, int band,
                         const std::vector<std::uint16_t>& samples) {
  char header[64];
  std::snprintf(header, sizeof(header), "CSR1 %d %d %d\n", width, height, band);
  std::string out(header);
  out.reserve(out.size() + samples.size() * 2);
  for (std::uint16_t s : samples) {
    out.push_back(static_cast<char>(s & 0xFF));
    out.push_back(static_cast<char>(s >> 8));
  }
  return out;
}

}  // namespace

const BandInfo& band_info(BandId id) {
  for (const BandInfo& info : kBandTable)
    if (info.id == id) return info;
  throw DomainError("band_info: no wavelength metadata for band " +
                    std::to_string(static_cast<int>(id)));
}

void Raster::validate() const {
  if (width <= 0 || height <= 0) throw ShapeError("Raster: dimensions must be positive");
  if (samples.size() != pixel_count())
    throw ShapeError("Raster: sample count does not match dimensions");
}

MaskGrid::MaskGrid(int w, int h, std::uint8_t fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw ShapeError("MaskGrid: dimensions must be positive");
  bits.assign(pixel_count(), fill ? 1 : 0);
}

std::uint64_t MaskGrid::count_set() const {
  std::uint64_t n = 0;
  for (std::uint8_t b : bits) n += b;
  return n;
}

void MaskGrid::validate() const {
  if (width <= 0 || height <= 0) throw ShapeError("MaskGrid: dimensions must be positive");
  if (bits.size() != pixel_count())
    throw ShapeError("MaskGrid: bit count does not match dimensions");
}

void QaRaster::validate() const {
  if (width <= 0 || height <= 0) throw ShapeError("QaRaster: dimensions must be positive");
  if (words.size() != pixel_count())
    throw ShapeError("QaRaster: word count does not match dimensions");
}

Raster read_raster(const fs::path& path) {
  const std::string bytes = read_file(path);
  const RasterHeader header = parse_raster_header(bytes, path);
  Raster raster;
  raster.width = header.width;
  raster.height = header.height;
  raster.band = static_cast<BandId>(header.band);
  raster.samples = parse_samples(bytes, header.payload_offset,
                                 raster.pixel_count(), path);
  return raster;
}

void write_raster(const Raster& raster, const fs::path& path) {
  raster.validate();
  write_file(path, raster_bytes(raster.width, raster.height,
                                static_cast<int>(raster.band), raster.samples));
}

QaRaster read_qa_raster(const fs::path& path) {
  Raster raw = read_raster(path);
  QaRaster qa;
  qa.width = raw.width;
  qa.height = raw.height;
  qa.words = std::move(raw.samples);
  qa.scene_id = std::move(raw.scene_id);
  return qa;
}

void write_qa_raster(const QaRaster& qa, const fs::path& path) {
  qa.validate();
  write_file(path, raster_bytes(qa.width, qa.height,
                                static_cast<int>(BandId::qa), qa.words));
}

MaskGrid read_mask(const fs::path& path) {
  const std::string bytes = read_file(path);
  // P5 header: magic, width, height, maxval as whitespace-separated tokens
  // ('#' comments allowed), then a single whitespace byte before the payload.
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])))
      ++pos;
    if (start == pos) throw FormatError(path.string() + ": truncated mask header");
    return bytes.substr(start, pos - start);
  };

  if (next_token() != "P5") throw FormatError(path.string() + ": not a P5 mask");
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(next_token());
    height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": unparsable mask header");
  }
  if (width <= 0 || height <= 0)
    throw FormatError(path.string() + ": non-positive mask dimensions");
  if (maxval != 255) throw FormatError(path.string() + ": mask maxval must be 255");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw FormatError(path.string() + ": missing separator before mask payload");
  ++pos;

  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() - pos < count)
    throw LengthError(path.string() + ": mask payload shorter than header advertises");
  if (bytes.size() - pos > count)
    throw LengthError(path.string() + ": mask payload longer than header advertises");

  MaskGrid mask(width, height);
  for (std::size_t i = 0; i < count; ++i) {
    const auto b = static_cast<unsigned char>(bytes[pos + i]);
    if (b == 0)
      mask.bits[i] = 0;
    else if (b == 255)
      mask.bits[i] = 1;
    else
      throw FormatError(path.string() + ": mask sample " + std::to_string(b) +
                        " is neither 0 nor 255");
  }
  return mask;
}

void write_mask(const MaskGrid& mask, const fs::path& path) {
  mask.validate();
  char header[48];
  std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n", mask.width, mask.height);
  std::string out(header);
  out.reserve(out.size() + mask.bits.size());
  for (std::uint8_t b : mask.bits)
    out.push_back(b ? static_cast<char>(255) : static_cast<char>(0));
  write_file(path, out);
}

}  // namespace cloudseg::io
