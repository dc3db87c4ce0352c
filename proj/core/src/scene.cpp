#include "cloudseg/scene.hpp"

namespace cloudseg::io {

std::string band_file_name(BandId band) {
  return "band" + std::to_string(static_cast<int>(band)) + ".csr1";
}

void SceneBands::validate() const {
  red.validate();
  green.validate();
  blue.validate();
  nir.validate();
  const Raster* rest[] = {&green, &blue, &nir};
  for (const Raster* band : rest) {
    if (band->width != red.width || band->height != red.height)
      throw ShapeError("scene " + scene_id + ": band dimensions disagree");
  }
}

SceneBands load_scene_bands(const fs::path& scene_dir) {
  if (!fs::is_directory(scene_dir))
    throw IoError("scene directory not found: " + scene_dir.string());
  SceneBands scene;
  scene.scene_id = scene_dir.filename().string();
  scene.blue = read_raster(scene_dir / band_file_name(BandId::blue));
  scene.green = read_raster(scene_dir / band_file_name(BandId::green));
  scene.red = read_raster(scene_dir / band_file_name(BandId::red));
  scene.nir = read_raster(scene_dir / band_file_name(BandId::nir));
  scene.validate();
  return scene;
}

QaRaster load_scene_qa(const fs::path& scene_dir) {
  QaRaster qa = read_qa_raster(scene_dir / qa_file_name());
  qa.scene_id = scene_dir.filename().string();
  return qa;
}

}  // namespace cloudseg::io
