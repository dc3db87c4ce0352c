#pragma once

#include <vector>

#include "cloudseg/raster.hpp"

namespace cloudseg::pipeline {

// Scalar image plane used between rasters and the network: doubles in
// whatever range the caller established (band planes live in [0, 1]).
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0);

  double at(int y, int x) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  double& at(int y, int x) {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  bool same_shape(const Plane& other) const {
    return width == other.width && height == other.height;
  }
};

// Non-overlapping tiling of a scene into square patches. Partial edge
// patches are completed by reflecting the scene content (mirror about the
// border pixel, which is not repeated).
struct PatchGrid {
  int scene_width = 0;
  int scene_height = 0;
  int patch_size = 0;
  int rows = 0;
  int cols = 0;
  int pad_right = 0;
  int pad_bottom = 0;

  int patch_count() const { return rows * cols; }
};

PatchGrid make_patch_grid(int scene_width, int scene_height, int patch_size);

/// Mirrors an out-of-range coordinate back into [0, n). reflect(4, n=4) = 2.
int reflect_index(int i, int n);

/// Row-major samples of patch (row, col), reflect-padded where the patch
/// extends past the scene.
template <class T>
std::vector<T> extract_patch(const std::vector<T>& data, int width, int height,
                             const PatchGrid& grid, int row, int col) {
  if (static_cast<std::size_t>(width) * height != data.size())
    throw ShapeError("extract_patch: data does not match dimensions");
  if (row < 0 || row >= grid.rows || col < 0 || col >= grid.cols)
    throw DomainError("extract_patch: patch index out of range");
  std::vector<T> out(static_cast<std::size_t>(grid.patch_size) * grid.patch_size);
  std::size_t o = 0;
  for (int y = 0; y < grid.patch_size; ++y) {
    const int sy = reflect_index(row * grid.patch_size + y, height);
    const T* src = data.data() + static_cast<std::size_t>(sy) * width;
    for (int x = 0; x < grid.patch_size; ++x, ++o)
      out[o] = src[reflect_index(col * grid.patch_size + x, width)];
  }
  return out;
}

std::vector<Plane> tile_plane(const Plane& plane, const PatchGrid& grid);
std::vector<io::Raster> tile_raster(const io::Raster& raster, const PatchGrid& grid);
std::vector<io::MaskGrid> tile_mask(const io::MaskGrid& mask, const PatchGrid& grid);

/// Reassembles row-major patches into a scene-sized plane, discarding the
/// padded margins. Expects exactly grid.patch_count() patches of
/// grid.patch_size square.
Plane stitch(const std::vector<Plane>& patches, const PatchGrid& grid);

Plane raster_to_plane(const io::Raster& raster);  // samples / 65535
Plane mask_to_plane(const io::MaskGrid& mask);    // bits as 0.0 / 1.0

}  // namespace cloudseg::pipeline
