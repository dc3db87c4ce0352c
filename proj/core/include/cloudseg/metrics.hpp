#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "cloudseg/raster.hpp"

namespace cloudseg::metrics {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& other);
};

ConfusionCounts confusion(const io::MaskGrid& predicted, const io::MaskGrid& truth);

// A metric whose denominator is zero is reported as absent rather than 0 or
// NaN.
struct MetricReport {
  std::optional<double> jaccard;           // tp / (tp + fn + fp)
  std::optional<double> precision;         // tp / (tp + fp)
  std::optional<double> recall;            // tp / (tp + fn)
  std::optional<double> overall_accuracy;  // (tp + tn) / total
};

MetricReport compute_metrics(const ConfusionCounts& counts);

enum class AggregateMode {
  pooled,  // sum counts across scenes, then compute metrics once
  mean,    // average each metric over the scenes where it is defined
};

/// Aggregate metrics over a nonempty set of per-scene counts.
MetricReport aggregate(std::span<const ConfusionCounts> scenes, AggregateMode mode);

ConfusionCounts sum_counts(std::span<const ConfusionCounts> scenes);

}  // namespace cloudseg::metrics
