#pragma once

#include <cstdint>

#include "cloudseg/raster.hpp"

namespace cloudseg::io {

// Which QA bits flag a pixel as cloud or snow. A pixel matches a class when
// (word & mask) == value. Defaults follow the pre-collection Landsat 8 BQA
// layout: bits 14-15 cloud confidence, bits 10-11 snow/ice confidence, with
// both bits set meaning high confidence.
struct QaBitConfig {
  std::uint16_t cloud_mask = 0xC000;
  std::uint16_t cloud_value = 0xC000;
  std::uint16_t snow_mask = 0x0C00;
  std::uint16_t snow_value = 0x0C00;

  void validate() const;

  bool is_cloud(std::uint16_t word) const {
    return (word & cloud_mask) == cloud_value;
  }
  bool is_snow(std::uint16_t word) const {
    return (word & snow_mask) == snow_value;
  }
};

struct QaMasks {
  MaskGrid cloud;
  MaskGrid snow;
  MaskGrid clear;
};

/// Splits a QA raster into cloud / snow / clear masks. The three masks
/// partition the pixel grid; a word matching both classes counts as cloud.
QaMasks decode_qa(const QaRaster& qa, const QaBitConfig& config);

}  // namespace cloudseg::io
