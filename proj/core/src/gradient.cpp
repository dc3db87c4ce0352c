#include "cloudseg/gradient.hpp"

#include <algorithm>
#include <cmath>

namespace cloudseg::correction {

GradientField gradient_magnitude(const io::Raster& band) {
  band.validate();
  const int w = band.width;
  const int h = band.height;
  GradientField field;
  field.width = w;
  field.height = h;
  field.magnitudes.resize(static_cast<std::size_t>(w) * h);

  auto sample = [&](int y, int x) {
    y = std::clamp(y, 0, h - 1);
    x = std::clamp(x, 0, w - 1);
    return band.samples[static_cast<std::size_t>(y) * w + x] / 65535.0;
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double tl = sample(y - 1, x - 1), tc = sample(y - 1, x), tr = sample(y - 1, x + 1);
      const double ml = sample(y, x - 1), mr = sample(y, x + 1);
      const double bl = sample(y + 1, x - 1), bc = sample(y + 1, x), br = sample(y + 1, x + 1);
      const double gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
      const double gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
      field.magnitudes[static_cast<std::size_t>(y) * w + x] = std::hypot(gx, gy);
    }
  }
  return field;
}

RegionGradientStats region_stats(const GradientField& field, const io::MaskGrid& cloud,
                                 const io::MaskGrid& snow, const io::MaskGrid& clear) {
  const std::size_t expect = field.pixel_count();
  if (field.magnitudes.size() != expect)
    throw ShapeError("region_stats: gradient field size mismatch");
  const io::MaskGrid* masks[] = {&cloud, &snow, &clear};
  for (const io::MaskGrid* m : masks) {
    if (m->width != field.width || m->height != field.height)
      throw ShapeError("region_stats: region mask dimensions disagree with field");
  }

  double sums[3] = {0.0, 0.0, 0.0};
  std::uint64_t counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < expect; ++i) {
    const int membership = cloud.bits[i] + snow.bits[i] + clear.bits[i];
    if (membership != 1)
      throw InputError("region_stats: pixel " + std::to_string(i) + " belongs to " +
                       std::to_string(membership) + " regions, expected exactly 1");
    const int region = cloud.bits[i] ? 0 : (snow.bits[i] ? 1 : 2);
    sums[region] += field.magnitudes[i];
    ++counts[region];
  }

  RegionGradientStats stats;
  stats.cloud_pixels = counts[0];
  stats.snow_pixels = counts[1];
  stats.clear_pixels = counts[2];
  if (counts[0] > 0) stats.mean_cloud = sums[0] / static_cast<double>(counts[0]);
  if (counts[1] > 0) stats.mean_snow = sums[1] / static_cast<double>(counts[1]);
  if (counts[2] > 0) stats.mean_clear = sums[2] / static_cast<double>(counts[2]);
  return stats;
}

io::MaskGrid snow_mask(const GradientField& field, double threshold) {
  if (field.width <= 0 || field.height <= 0 || field.magnitudes.size() != field.pixel_count())
    throw ShapeError("snow_mask: malformed gradient field");
  if (!(threshold >= 0.0)) throw DomainError("snow_mask: threshold must be non-negative");
  io::MaskGrid out(field.width, field.height);
  for (std::size_t i = 0; i < out.bits.size(); ++i)
    out.bits[i] = field.magnitudes[i] > threshold ? 1 : 0;
  return out;
}

io::MaskGrid correct_ground_truth(const io::MaskGrid& default_cloud, const io::MaskGrid& snow) {
  if (!default_cloud.same_shape(snow))
    throw ShapeError("correct_ground_truth: mask dimensions disagree");
  io::MaskGrid out(default_cloud.width, default_cloud.height);
  for (std::size_t i = 0; i < out.bits.size(); ++i)
    out.bits[i] = (default_cloud.bits[i] && !snow.bits[i]) ? 1 : 0;
  return out;
}

double percentile(std::vector<double> values, double rank) {
  if (values.empty()) throw InputError("percentile: empty sample");
  if (!(rank >= 0.0 && rank <= 100.0))
    throw DomainError("percentile: rank must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = (rank / 100.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

ChosenThreshold choose_threshold(const GradientField& field, const io::MaskGrid* cloud_region,
                                 const ThresholdSettings& settings) {
  if (!(settings.fixed_value >= 0.0))
    throw DomainError("choose_threshold: fixed threshold must be non-negative");
  if (settings.mode == ThresholdSettings::Mode::fixed)
    return {settings.fixed_value, false};

  if (cloud_region == nullptr || cloud_region->count_set() == 0)
    return {settings.fixed_value, false};
  if (cloud_region->width != field.width || cloud_region->height != field.height)
    throw ShapeError("choose_threshold: cloud region dimensions disagree with field");

  std::vector<double> cloud_values;
  cloud_values.reserve(cloud_region->count_set());
  for (std::size_t i = 0; i < field.magnitudes.size(); ++i)
    if (cloud_region->bits[i]) cloud_values.push_back(field.magnitudes[i]);
  return {percentile(std::move(cloud_values), settings.percentile_rank), true};
}

}  // namespace cloudseg::correction
