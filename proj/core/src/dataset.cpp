#include "cloudseg/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cloudseg::data {

void write_manifest(const std::vector<PatchRecord>& records, const fs::path& path) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file << "patch_id,scene_id,row,col\n";
  for (const PatchRecord& rec : records)
    file << rec.patch_id << ',' << rec.scene_id << ',' << rec.row << ',' << rec.col << '\n';
  if (!file) throw IoError("write failed for " + path.string());
}

std::vector<PatchRecord> read_manifest(const fs::path& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(file, line) || line != "patch_id,scene_id,row,col")
    throw FormatError(path.string() + ": bad manifest header");
  std::vector<PatchRecord> records;
  std::size_t line_no = 1;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream in(line);
    PatchRecord rec;
    std::string row_text, col_text;
    if (!std::getline(in, rec.patch_id, ',') || !std::getline(in, rec.scene_id, ',') ||
        !std::getline(in, row_text, ',') || !std::getline(in, col_text))
      throw FormatError(path.string() + ": malformed manifest line " +
                        std::to_string(line_no));
    try {
      rec.row = std::stoi(row_text);
      rec.col = std::stoi(col_text);
    } catch (const std::exception&) {
      throw FormatError(path.string() + ": non-numeric patch index on line " +
                        std::to_string(line_no));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::string patch_band_file(const std::string& patch_id, io::BandId band) {
  return patch_id + "_" + io::band_file_name(band);
}

std::string patch_mask_file(const std::string& patch_id) { return patch_id + "_gt.pgm"; }

void prepare_scene(const io::SceneBands& scene, const io::MaskGrid& ground_truth,
                   int patch_size, int net_size, const fs::path& dir,
                   std::vector<PatchRecord>& records) {
  scene.validate();
  ground_truth.validate();
  if (ground_truth.width != scene.width() || ground_truth.height != scene.height())
    throw ShapeError("prepare_scene: ground truth dimensions disagree with scene");
  if (net_size <= 0) throw DomainError("prepare_scene: net_size must be positive");

  const pipeline::PatchGrid grid =
      pipeline::make_patch_grid(scene.width(), scene.height(), patch_size);
  const io::Raster* bands[4] = {&scene.red, &scene.green, &scene.blue, &scene.nir};
  pipeline::Plane band_planes[4];
  for (int c = 0; c < 4; ++c) band_planes[c] = pipeline::raster_to_plane(*bands[c]);
  const pipeline::Plane gt_plane = pipeline::mask_to_plane(ground_truth);

  for (int row = 0; row < grid.rows; ++row) {
    for (int col = 0; col < grid.cols; ++col) {
      PatchRecord rec;
      rec.scene_id = scene.scene_id;
      rec.row = row;
      rec.col = col;
      rec.patch_id =
          scene.scene_id + "_r" + std::to_string(row) + "_c" + std::to_string(col);

      for (int c = 0; c < 4; ++c) {
        pipeline::Plane patch;
        patch.width = grid.patch_size;
        patch.height = grid.patch_size;
        patch.values = pipeline::extract_patch(band_planes[c].values, scene.width(),
                                               scene.height(), grid, row, col);
        const pipeline::Plane resized = pipeline::resize_bilinear(patch, net_size, net_size);
        io::Raster out;
        out.width = net_size;
        out.height = net_size;
        out.band = bands[c]->band;
        out.scene_id = scene.scene_id;
        out.samples.resize(resized.values.size());
        for (std::size_t i = 0; i < resized.values.size(); ++i)
          out.samples[i] = static_cast<std::uint16_t>(std::lround(resized.values[i] * 65535.0));
        io::write_raster(out, dir / patch_band_file(rec.patch_id, out.band));
      }

      pipeline::Plane gt_patch;
      gt_patch.width = grid.patch_size;
      gt_patch.height = grid.patch_size;
      gt_patch.values = pipeline::extract_patch(gt_plane.values, scene.width(),
                                                scene.height(), grid, row, col);
      const pipeline::Plane gt_resized =
          pipeline::resize_bilinear(gt_patch, net_size, net_size);
      io::MaskGrid gt_mask(net_size, net_size);
      for (std::size_t i = 0; i < gt_resized.values.size(); ++i)
        gt_mask.bits[i] = gt_resized.values[i] >= 0.5 ? 1 : 0;
      io::write_mask(gt_mask, dir / patch_mask_file(rec.patch_id));

      records.push_back(std::move(rec));
    }
  }
}

}  // namespace cloudseg::data
