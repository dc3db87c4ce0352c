#pragma once

#include <string>

#include "cloudseg/qa.hpp"
#include "cloudseg/raster.hpp"
#include "cloudseg/tensor.hpp"

namespace cloudseg::io {

// The four bands the network consumes, in channel order.
struct SceneBands {
  std::string scene_id;
  Raster red;
  Raster green;
  Raster blue;
  Raster nir;

  int width() const { return red.width; }
  int height() const { return red.height; }
  void validate() const;
};

/// File name inside a scene directory for one band, e.g. "band4.csr1".
std::string band_file_name(BandId band);

inline const char* qa_file_name() { return "qa.csr1"; }

/// Loads band4/band3/band2/band5 (red, green, blue, nir) from a scene
/// directory. The directory name becomes the scene id.
SceneBands load_scene_bands(const fs::path& scene_dir);

QaRaster load_scene_qa(const fs::path& scene_dir);

/// Stacks the four bands into a (1, 4, height, width) tensor with samples
/// scaled by 1/65535 into [0, 1]. Channel order: red, green, blue, nir.
template <class T>
Tensor4<T> stack_bands(const SceneBands& scene) {
  scene.validate();
  const int h = scene.height();
  const int w = scene.width();
  Tensor4<T> out(1, 4, h, w);
  const Raster* bands[4] = {&scene.red, &scene.green, &scene.blue, &scene.nir};
  for (int c = 0; c < 4; ++c) {
    T* dst = out.plane(0, c);
    const std::uint16_t* src = bands[c]->samples.data();
    const std::size_t n = bands[c]->pixel_count();
    for (std::size_t i = 0; i < n; ++i)
      dst[i] = static_cast<T>(static_cast<double>(src[i]) / 65535.0);
  }
  return out;
}

}  // namespace cloudseg::io
