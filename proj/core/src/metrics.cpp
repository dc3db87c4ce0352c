#include "cloudseg/metrics.hpp"

namespace cloudseg::metrics {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  tp += other.tp;
  tn += other.tn;
  fp += other.fp;
  fn += other.fn;
  return *this;
}

ConfusionCounts confusion(const io::MaskGrid& predicted, const io::MaskGrid& truth) {
  predicted.validate();
  truth.validate();
  if (!predicted.same_shape(truth))
    throw ShapeError("confusion: predicted and truth dimensions disagree");
  ConfusionCounts counts;
  for (std::size_t i = 0; i < predicted.bits.size(); ++i) {
    const bool p = predicted.bits[i] != 0;
    const bool t = truth.bits[i] != 0;
    if (p && t)
      ++counts.tp;
    else if (p && !t)
      ++counts.fp;
    else if (!p && t)
      ++counts.fn;
    else
      ++counts.tn;
  }
  return counts;
}

MetricReport compute_metrics(const ConfusionCounts& counts) {
  MetricReport report;
  const std::uint64_t jd = counts.tp + counts.fn + counts.fp;
  if (jd > 0) report.jaccard = static_cast<double>(counts.tp) / static_cast<double>(jd);
  if (counts.tp + counts.fp > 0)
    report.precision =
        static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
  if (counts.tp + counts.fn > 0)
    report.recall =
        static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
  if (counts.total() > 0)
    report.overall_accuracy =
        static_cast<double>(counts.tp + counts.tn) / static_cast<double>(counts.total());
  return report;
}

ConfusionCounts sum_counts(std::span<const ConfusionCounts> scenes) {
  ConfusionCounts total;
  for (const ConfusionCounts& c : scenes) total += c;
  return total;
}

MetricReport aggregate(std::span<const ConfusionCounts> scenes, AggregateMode mode) {
  if (scenes.empty()) throw InputError("aggregate: no scenes");
  if (mode == AggregateMode::pooled) return compute_metrics(sum_counts(scenes));

  double sums[4] = {0.0, 0.0, 0.0, 0.0};
  std::uint64_t counts[4] = {0, 0, 0, 0};
  for (const ConfusionCounts& scene : scenes) {
    const MetricReport r = compute_metrics(scene);
    const std::optional<double>* fields[4] = {&r.jaccard, &r.precision, &r.recall,
                                              &r.overall_accuracy};
    for (int k = 0; k < 4; ++k) {
      if (fields[k]->has_value()) {
        sums[k] += **fields[k];
        ++counts[k];
      }
    }
  }
  MetricReport out;
  std::optional<double>* fields[4] = {&out.jaccard, &out.precision, &out.recall,
                                      &out.overall_accuracy};
  for (int k = 0; k < 4; ++k)
    if (counts[k] > 0) *fields[k] = sums[k] / static_cast<double>(counts[k]);
  return out;
}

}  // namespace cloudseg::metrics
