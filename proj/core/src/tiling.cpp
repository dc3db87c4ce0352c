#include "cloudseg/tiling.hpp"

#include <algorithm>

namespace cloudseg::pipeline {

Plane::Plane(int w, int h, double fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw ShapeError("Plane: dimensions must be positive");
  values.assign(static_cast<std::size_t>(w) * h, fill);
}

PatchGrid make_patch_grid(int scene_width, int scene_height, int patch_size) {
  if (scene_width <= 0 || scene_height <= 0)
    throw ShapeError("make_patch_grid: scene dimensions must be positive");
  if (patch_size <= 0) throw DomainError("make_patch_grid: patch size must be positive");
  PatchGrid grid;
  grid.scene_width = scene_width;
  grid.scene_height = scene_height;
  grid.patch_size = patch_size;
  grid.cols = (scene_width + patch_size - 1) / patch_size;
  grid.rows = (scene_height + patch_size - 1) / patch_size;
  grid.pad_right = grid.cols * patch_size - scene_width;
  grid.pad_bottom = grid.rows * patch_size - scene_height;
  return grid;
}

int reflect_index(int i, int n) {
  if (n <= 0) throw DomainError("reflect_index: extent must be positive");
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

Plane raster_to_plane(const io::Raster& raster) {
  raster.validate();
  Plane plane(raster.width, raster.height);
  for (std::size_t i = 0; i < raster.samples.size(); ++i)
    plane.values[i] = raster.samples[i] / 65535.0;
  return plane;
}

Plane mask_to_plane(const io::MaskGrid& mask) {
  mask.validate();
  Plane plane(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.bits.size(); ++i)
    plane.values[i] = mask.bits[i] ? 1.0 : 0.0;
  return plane;
}

std::vector<Plane> tile_plane(const Plane& plane, const PatchGrid& grid) {
  if (plane.width != grid.scene_width || plane.height != grid.scene_height)
    throw ShapeError("tile_plane: plane dimensions disagree with grid");
  std::vector<Plane> patches;
  patches.reserve(static_cast<std::size_t>(grid.patch_count()));
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      Plane patch;
      patch.width = grid.patch_size;
      patch.height = grid.patch_size;
      patch.values = extract_patch(plane.values, plane.width, plane.height, grid, r, c);
      patches.push_back(std::move(patch));
    }
  }
  return patches;
}

std::vector<io::Raster> tile_raster(const io::Raster& raster, const PatchGrid& grid) {
  raster.validate();
  if (raster.width != grid.scene_width || raster.height != grid.scene_height)
    throw ShapeError("tile_raster: raster dimensions disagree with grid");
  std::vector<io::Raster> patches;
  patches.reserve(static_cast<std::size_t>(grid.patch_count()));
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      io::Raster patch;
      patch.width = grid.patch_size;
      patch.height = grid.patch_size;
      patch.band = raster.band;
      patch.scene_id = raster.scene_id;
      patch.samples = extract_patch(raster.samples, raster.width, raster.height, grid, r, c);
      patches.push_back(std::move(patch));
    }
  }
  return patches;
}

std::vector<io::MaskGrid> tile_mask(const io::MaskGrid& mask, const PatchGrid& grid) {
  mask.validate();
  if (mask.width != grid.scene_width || mask.height != grid.scene_height)
    throw ShapeError("tile_mask: mask dimensions disagree with grid");
  std::vector<io::MaskGrid> patches;
  patches.reserve(static_cast<std::size_t>(grid.patch_count()));
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      io::MaskGrid patch(grid.patch_size, grid.patch_size);
      patch.bits = extract_patch(mask.bits, mask.width, mask.height, grid, r, c);
      patches.push_back(std::move(patch));
    }
  }
  return patches;
}

Plane stitch(const std::vector<Plane>& patches, const PatchGrid& grid) {
  if (patches.size() != static_cast<std::size_t>(grid.patch_count()))
    throw ShapeError("stitch: expected " + std::to_string(grid.patch_count()) +
                     " patches, got " + std::to_string(patches.size()));
  for (const Plane& p : patches) {
    if (p.width != grid.patch_size || p.height != grid.patch_size)
      throw ShapeError("stitch: patch dimensions disagree with grid");
  }
  Plane scene(grid.scene_width, grid.scene_height);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const Plane& patch = patches[static_cast<std::size_t>(r) * grid.cols + c];
      const int y0 = r * grid.patch_size;
      const int x0 = c * grid.patch_size;
      const int copy_h = std::min(grid.patch_size, grid.scene_height - y0);
      const int copy_w = std::min(grid.patch_size, grid.scene_width - x0);
      for (int y = 0; y < copy_h; ++y)
        for (int x = 0; x < copy_w; ++x)
          scene.at(y0 + y, x0 + x) = patch.at(y, x);
    }
  }
  return scene;
}

}  // namespace cloudseg::pipeline
