#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cloudseg/raster.hpp"

namespace cloudseg::correction {

// Per-pixel gradient magnitude of a band, samples normalized to [0, 1].
struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> magnitudes;

  double at(int y, int x) const {
    return magnitudes[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
};

/// 3x3 Sobel gradient magnitude with replicate padding at the borders.
GradientField gradient_magnitude(const io::Raster& band);

struct RegionGradientStats {
  std::optional<double> mean_cloud;
  std::optional<double> mean_snow;
  std::optional<double> mean_clear;
  std::uint64_t cloud_pixels = 0;
  std::uint64_t snow_pixels = 0;
  std::uint64_t clear_pixels = 0;
};

/// Mean gradient magnitude per region. The three masks must partition the
/// grid; a mean is absent when its region is empty.
RegionGradientStats region_stats(const GradientField& field,
                                 const io::MaskGrid& cloud,
                                 const io::MaskGrid& snow,
                                 const io::MaskGrid& clear);

/// Pixels whose magnitude strictly exceeds the threshold. threshold >= 0.
io::MaskGrid snow_mask(const GradientField& field, double threshold);

/// default_cloud AND NOT snow.
io::MaskGrid correct_ground_truth(const io::MaskGrid& default_cloud,
                                  const io::MaskGrid& snow);

/// Linear-interpolation percentile of a nonempty sample, rank in [0, 100].
double percentile(std::vector<double> values, double rank);

struct ThresholdSettings {
  enum class Mode { percentile, fixed };
  Mode mode = Mode::percentile;
  double percentile_rank = 95.0;  // applied to cloud-region magnitudes
  double fixed_value = 0.1;       // also the fallback when no cloud region
};

struct ChosenThreshold {
  double value = 0.0;
  bool from_percentile = false;
};

/// Threshold per the settings. In percentile mode the rank is taken over the
/// magnitudes inside `cloud_region`; an absent or empty region falls back to
/// the fixed value.
ChosenThreshold choose_threshold(const GradientField& field,
                                 const io::MaskGrid* cloud_region,
                                 const ThresholdSettings& settings);

}  // namespace cloudseg::correction
