#include "cloudseg/predict.hpp"

namespace cloudseg::pipeline {

io::MaskGrid binarize(const Plane& probability, double threshold) {
  if (probability.width <= 0 || probability.height <= 0 ||
      probability.values.size() != probability.pixel_count())
    throw ShapeError("binarize: malformed probability plane");
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw DomainError("binarize: threshold must lie in [0, 1]");
  io::MaskGrid mask(probability.width, probability.height);
  for (std::size_t i = 0; i < probability.values.size(); ++i)
    mask.bits[i] = probability.values[i] >= threshold ? 1 : 0;
  return mask;
}

}  // namespace cloudseg::pipeline
