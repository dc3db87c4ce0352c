#include <benchmark/benchmark.h>

#include "cloudseg/gradient.hpp"
#include "cloudseg/predict.hpp"
#include "cloudseg/resize.hpp"
#include "cloudseg/rng.hpp"
#include "cloudseg/tiling.hpp"
#include "cloudseg/unet.hpp"

using namespace cloudseg;

namespace {

io::Raster random_raster(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  io::Raster r;
  r.width = w;
  r.height = h;
  r.band = io::BandId::blue;
  r.samples.resize(static_cast<std::size_t>(w) * h);
  for (auto& s : r.samples) s = static_cast<std::uint16_t>(rng.below(65536));
  return r;
}

void bm_gradient_magnitude(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const io::Raster raster = random_raster(size, size, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(correction::gradient_magnitude(raster));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(size) * size);
}
BENCHMARK(bm_gradient_magnitude)->Arg(256)->Arg(1024);

void bm_percentile_threshold(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const io::Raster raster = random_raster(size, size, 8);
  const correction::GradientField field = correction::gradient_magnitude(raster);
  io::MaskGrid region(size, size);
  Rng rng(9);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      if (rng.coin()) region.set(y, x, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        correction::choose_threshold(field, &region, correction::ThresholdSettings{}));
  }
}
BENCHMARK(bm_percentile_threshold)->Arg(256)->Arg(1024);

void bm_bilinear_resize(benchmark::State& state) {
  const int from = static_cast<int>(state.range(0));
  const int to = static_cast<int>(state.range(1));
  Rng rng(10);
  pipeline::Plane plane(from, from);
  for (auto& v : plane.values) v = rng.uniform01();
  for (auto _ : state) {
    benchmark::DoNotOptimize(pipeline::resize_bilinear(plane, to, to));
  }
}
BENCHMARK(bm_bilinear_resize)->Args({384, 192})->Args({192, 384});

void bm_tile_and_stitch(benchmark::State& state) {
  const int scene = static_cast<int>(state.range(0));
  const int patch = static_cast<int>(state.range(1));
  Rng rng(11);
  pipeline::Plane plane(scene, scene);
  for (auto& v : plane.values) v = rng.uniform01();
  const pipeline::PatchGrid grid = pipeline::make_patch_grid(scene, scene, patch);
  for (auto _ : state) {
    std::vector<pipeline::Plane> patches;
    patches.reserve(static_cast<std::size_t>(grid.patch_count()));
    for (int row = 0; row < grid.rows; ++row)
      for (int col = 0; col < grid.cols; ++col) {
        pipeline::Plane p(grid.patch_size, grid.patch_size);
        p.values = pipeline::extract_patch(plane.values, plane.width, plane.height,
                                           grid, row, col);
        patches.push_back(std::move(p));
      }
    benchmark::DoNotOptimize(pipeline::stitch(patches, grid));
  }
}
BENCHMARK(bm_tile_and_stitch)->Args({1024, 384});

void bm_unet_forward(benchmark::State& state) {
  unet::NetworkConfig cfg;
  cfg.input_size = static_cast<int>(state.range(0));
  cfg.in_channels = 4;
  cfg.base_channels = static_cast<int>(state.range(1));
  cfg.channel_cap = 64;
  cfg.encode_blocks = 4;
  cfg.decode_blocks = 3;
  const unet::ModelParams<float> params = unet::init_params<float>(cfg, 12);
  Rng rng(13);
  Tensor4<float> input(1, 4, cfg.input_size, cfg.input_size);
  for (auto& v : input.values) v = static_cast<float>(rng.uniform01());
  for (auto _ : state) {
    benchmark::DoNotOptimize(unet::forward(params, input));
  }
}
BENCHMARK(bm_unet_forward)->Args({32, 4})->Args({64, 8});

void bm_unet_backward(benchmark::State& state) {
  unet::NetworkConfig cfg;
  cfg.input_size = static_cast<int>(state.range(0));
  cfg.in_channels = 4;
  cfg.base_channels = static_cast<int>(state.range(1));
  cfg.channel_cap = 64;
  cfg.encode_blocks = 4;
  cfg.decode_blocks = 3;
  const unet::ModelParams<float> params = unet::init_params<float>(cfg, 14);
  Rng rng(15);
  Tensor4<float> input(1, 4, cfg.input_size, cfg.input_size);
  for (auto& v : input.values) v = static_cast<float>(rng.uniform01());
  Tensor4<float> grad(1, 1, cfg.input_size, cfg.input_size);
  for (auto& v : grad.values) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  for (auto _ : state) {
    unet::ForwardResult<float> fwd = unet::forward(params, input);
    benchmark::DoNotOptimize(unet::backward(params, fwd.tape, grad));
  }
}
BENCHMARK(bm_unet_backward)->Args({32, 4});

}  // namespace
