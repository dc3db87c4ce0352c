#pragma once

#include <string>
#include <vector>

#include "cloudseg/predict.hpp"
#include "cloudseg/resize.hpp"
#include "cloudseg/scene.hpp"
#include "cloudseg/tiling.hpp"
#include "cloudseg/trainer.hpp"

namespace cloudseg::data {

namespace fs = std::filesystem;

struct PatchRecord {
  std::string patch_id;  // "<scene>_r<row>_c<col>"
  std::string scene_id;
  int row = 0;
  int col = 0;
};

inline const char* manifest_file_name() { return "manifest.csv"; }

/// Lines of "patch_id,scene_id,row,col".
void write_manifest(const std::vector<PatchRecord>& records, const fs::path& path);
std::vector<PatchRecord> read_manifest(const fs::path& path);

std::string patch_band_file(const std::string& patch_id, io::BandId band);
std::string patch_mask_file(const std::string& patch_id);

/// Cuts one scene into patch_size tiles, resizes each band tile and the
/// ground-truth tile to net_size, and writes them under `dir` (bands as
/// 16-bit rasters re-quantized from [0, 1], the mask binarized at 0.5 after
/// bilinear resampling). Appends one record per patch.
void prepare_scene(const io::SceneBands& scene, const io::MaskGrid& ground_truth,
                   int patch_size, int net_size, const fs::path& dir,
                   std::vector<PatchRecord>& records);

/// Loads every manifest entry under `dir` into memory as training samples.
template <class T>
std::vector<train::Sample<T>> load_patch_dataset(const fs::path& dir) {
  const std::vector<PatchRecord> records = read_manifest(dir / manifest_file_name());
  if (records.empty()) throw InputError("load_patch_dataset: manifest is empty");
  std::vector<train::Sample<T>> samples;
  samples.reserve(records.size());
  const io::BandId order[4] = {io::BandId::red, io::BandId::green, io::BandId::blue,
                               io::BandId::nir};
  for (const PatchRecord& rec : records) {
    io::SceneBands bands;
    bands.scene_id = rec.patch_id;
    io::Raster* slots[4] = {&bands.red, &bands.green, &bands.blue, &bands.nir};
    for (int c = 0; c < 4; ++c)
      *slots[c] = io::read_raster(dir / patch_band_file(rec.patch_id, order[c]));
    const io::MaskGrid mask = io::read_mask(dir / patch_mask_file(rec.patch_id));
    if (mask.width != bands.red.width || mask.height != bands.red.height)
      throw ShapeError("load_patch_dataset: mask and bands disagree for '" +
                       rec.patch_id + "'");
    train::Sample<T> sample;
    sample.image = io::stack_bands<T>(bands);
    sample.mask = Tensor4<T>(1, 1, mask.height, mask.width);
    for (std::size_t i = 0; i < mask.bits.size(); ++i)
      sample.mask.values[i] = static_cast<T>(mask.bits[i]);
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace cloudseg::data
