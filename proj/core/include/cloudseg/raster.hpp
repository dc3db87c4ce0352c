#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cloudseg/errors.hpp"

namespace cloudseg::io {

namespace fs = std::filesystem;

// Landsat 8 band numbering. 0 marks derived or unspecified products; 12 is
// the quality-assessment band.
enum class BandId : int {
  unspecified = 0,
  ultra_blue = 1,
  blue = 2,
  green = 3,
  red = 4,
  nir = 5,
  swir1 = 6,
  swir2 = 7,
  panchromatic = 8,
  cirrus = 9,
  tirs1 = 10,
  tirs2 = 11,
  qa = 12,
};

struct BandInfo {
  BandId id;
  const char* name;
  double wavelength_lo_um;
  double wavelength_hi_um;
};

/// Wavelength metadata for spectral bands 1-11. DomainError otherwise.
const BandInfo& band_info(BandId id);

// Single-band scene image: row-major 16-bit samples.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> samples;
  BandId band = BandId::unspecified;
  std::string scene_id;

  std::uint16_t at(int y, int x) const {
    return samples[static_cast<std::size_t>(y) * width + x];
  }
  std::uint16_t& at(int y, int x) {
    return samples[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  void validate() const;
};

// Binary per-pixel grid; bits hold 0 or 1.
struct MaskGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  MaskGrid() = default;
  MaskGrid(int w, int h, std::uint8_t fill = 0);

  bool at(int y, int x) const {
    return bits[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int y, int x, bool value) {
    bits[static_cast<std::size_t>(y) * width + x] = value ? 1 : 0;
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  std::uint64_t count_set() const;
  bool same_shape(const MaskGrid& other) const {
    return width == other.width && height == other.height;
  }
  void validate() const;

  bool operator==(const MaskGrid& other) const = default;
};

// Quality-assessment image: per-pixel 16-bit flag words.
struct QaRaster {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> words;
  std::string scene_id;

  std::uint16_t at(int y, int x) const {
    return words[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  void validate() const;
};

// Band rasters are stored as an ASCII header "CSR1 <width> <height> <band_id>\n"
// followed by row-major little-endian 16-bit samples, exactly width*height of
// them. Masks are stored as binary PGM (P5, maxval 255) with 0 = negative and
// 255 = positive; no other sample values are accepted.

Raster read_raster(const fs::path& path);
void write_raster(const Raster& raster, const fs::path& path);

QaRaster read_qa_raster(const fs::path& path);
void write_qa_raster(const QaRaster& qa, const fs::path& path);

MaskGrid read_mask(const fs::path& path);
void write_mask(const MaskGrid& mask, const fs::path& path);

}  // namespace cloudseg::io
