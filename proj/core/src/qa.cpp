#include "cloudseg/qa.hpp"

namespace cloudseg::io {

void QaBitConfig::validate() const {
  if (cloud_mask == 0) throw ConfigError("qa: cloud_mask must be nonzero");
  if (snow_mask == 0) throw ConfigError("qa: snow_mask must be nonzero");
  if ((cloud_value & ~cloud_mask) != 0)
    throw ConfigError("qa: cloud_value has bits outside cloud_mask");
  if ((snow_value & ~snow_mask) != 0)
    throw ConfigError("qa: snow_value has bits outside snow_mask");
}

QaMasks decode_qa(const QaRaster& qa, const QaBitConfig& config) {
  qa.validate();
  config.validate();
  QaMasks out{MaskGrid(qa.width, qa.height), MaskGrid(qa.width, qa.height),
              MaskGrid(qa.width, qa.height)};
  for (std::size_t i = 0; i < qa.words.size(); ++i) {
    const std::uint16_t word = qa.words[i];
    if (config.is_cloud(word))
      out.cloud.bits[i] = 1;
    else if (config.is_snow(word))
      out.snow.bits[i] = 1;
    else
      out.clear.bits[i] = 1;
  }
  return out;
}

}  // namespace cloudseg::io
