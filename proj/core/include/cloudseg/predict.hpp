#pragma once

#include <array>

#include "cloudseg/resize.hpp"
#include "cloudseg/scene.hpp"
#include "cloudseg/tiling.hpp"
#include "cloudseg/unet.hpp"

namespace cloudseg::pipeline {

/// Pixels with probability >= threshold. threshold must lie in [0, 1].
io::MaskGrid binarize(const Plane& probability, double threshold);

struct PredictOptions {
  int patch_size = 384;    // tiling size at scene resolution
  double threshold = 0.5;  // applied once to the stitched scene map
};

template <class T>
struct ScenePrediction {
  Plane probability;  // scene-sized, values in [0, 1]
  io::MaskGrid mask;
};

/// Builds a (1, 4, net, net) input from four equally sized planes.
template <class T>
Tensor4<T> planes_to_tensor(const std::array<Plane, 4>& planes) {
  const int h = planes[0].height, w = planes[0].width;
  Tensor4<T> out(1, 4, h, w);
  for (int c = 0; c < 4; ++c) {
    if (planes[c].height != h || planes[c].width != w)
      throw ShapeError("planes_to_tensor: plane dimensions disagree");
    T* dst = out.plane(0, c);
    for (std::size_t i = 0; i < planes[c].values.size(); ++i)
      dst[i] = static_cast<T>(planes[c].values[i]);
  }
  return out;
}

/// Whole-scene inference: tile each band at opt.patch_size, resize every
/// patch to the network input size, run the network, resize the probability
/// patch back, stitch, and binarize once. Patches do not overlap, so the
/// stitched map is independent of processing order.
template <class T>
ScenePrediction<T> predict_scene(const unet::ModelParams<T>& params,
                                 const io::SceneBands& scene,
                                 const PredictOptions& opt) {
  scene.validate();
  if (opt.patch_size < 1) throw DomainError("predict_scene: patch_size must be >= 1");
  if (params.config.in_channels != 4)
    throw ConfigError("predict_scene: network must take 4 input channels");
  const int net = params.config.input_size;
  const PatchGrid grid = make_patch_grid(scene.width(), scene.height(), opt.patch_size);

  const std::array<const io::Raster*, 4> bands = {&scene.red, &scene.green,
                                                  &scene.blue, &scene.nir};
  std::array<Plane, 4> band_planes;
  for (int c = 0; c < 4; ++c) band_planes[c] = raster_to_plane(*bands[c]);

  std::vector<Plane> prob_patches(grid.patch_count());
  for (int row = 0; row < grid.rows; ++row) {
    for (int col = 0; col < grid.cols; ++col) {
      std::array<Plane, 4> net_planes;
      for (int c = 0; c < 4; ++c) {
        Plane patch;
        patch.width = grid.patch_size;
        patch.height = grid.patch_size;
        patch.values = extract_patch(band_planes[c].values, scene.width(),
                                     scene.height(), grid, row, col);
        net_planes[c] = resize_bilinear(patch, net, net);
      }
      unet::ForwardResult<T> out = unet::forward(params, planes_to_tensor<T>(net_planes));
      Plane prob(net, net);
      const T* src = out.probability.plane(0, 0);
      for (std::size_t i = 0; i < prob.values.size(); ++i)
        prob.values[i] = static_cast<double>(src[i]);
      prob_patches[row * grid.cols + col] =
          resize_bilinear(prob, grid.patch_size, grid.patch_size);
    }
  }

  ScenePrediction<T> result;
  result.probability = stitch(prob_patches, grid);
  result.mask = binarize(result.probability, opt.threshold);
  return result;
}

}  // namespace cloudseg::pipeline
