#include <benchmark/benchmark.h>

#include "cloudseg/layers.hpp"
#include "cloudseg/loss.hpp"
#include "cloudseg/rng.hpp"
#include "cloudseg/tensor.hpp"

using namespace cloudseg;

namespace {

Tensor4<float> random_tensor(Rng& rng, int n, int c, int h, int w) {
  Tensor4<float> t(n, c, h, w);
  for (auto& v : t.values) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return t;
}

layers::ConvKernel<float> random_conv(Rng& rng, int out_ch, int in_ch, int k) {
  layers::ConvKernel<float> kernel(out_ch, in_ch, k);
  for (auto& w : kernel.weights) w = static_cast<float>(rng.uniform(-0.1, 0.1));
  for (auto& b : kernel.bias) b = static_cast<float>(rng.uniform(-0.1, 0.1));
  return kernel;
}

void bm_conv2d_forward(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const int channels = static_cast<int>(state.range(1));
  Rng rng(1);
  const Tensor4<float> x = random_tensor(rng, 1, channels, size, size);
  const layers::ConvKernel<float> k = random_conv(rng, channels, channels, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(layers::conv2d_forward(x, k));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(size) * size *
                          channels * channels * 9);
}
BENCHMARK(bm_conv2d_forward)->Args({64, 16})->Args({128, 32})->Args({192, 32});

void bm_conv2d_backward(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const int channels = static_cast<int>(state.range(1));
  Rng rng(2);
  const Tensor4<float> x = random_tensor(rng, 1, channels, size, size);
  const layers::ConvKernel<float> k = random_conv(rng, channels, channels, 3);
  const Tensor4<float> upstream = random_tensor(rng, 1, channels, size, size);
  for (auto _ : state) {
    benchmark::DoNotOptimize(layers::conv2d_backward(x, k, upstream));
  }
}
BENCHMARK(bm_conv2d_backward)->Args({64, 16})->Args({128, 32});

void bm_maxpool(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  Rng rng(3);
  const Tensor4<float> x = random_tensor(rng, 1, 32, size, size);
  for (auto _ : state) {
    benchmark::DoNotOptimize(layers::maxpool2_forward(x));
  }
}
BENCHMARK(bm_maxpool)->Arg(96)->Arg(192);

void bm_convtrans(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  Rng rng(4);
  const Tensor4<float> x = random_tensor(rng, 1, 64, size, size);
  layers::UpKernel<float> k(64, 32);
  for (auto& w : k.weights) w = static_cast<float>(rng.uniform(-0.1, 0.1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(layers::convtrans2_forward(x, k));
  }
}
BENCHMARK(bm_convtrans)->Arg(24)->Arg(48);

void bm_jaccard_loss(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  Rng rng(5);
  Tensor4<float> truth(4, 1, size, size);
  for (auto& t : truth.values) t = rng.coin() ? 1.0f : 0.0f;
  Tensor4<float> pred(4, 1, size, size);
  for (auto& p : pred.values) p = static_cast<float>(rng.uniform01());
  for (auto _ : state) {
    benchmark::DoNotOptimize(train::jaccard_loss(truth, pred, 1e-7));
  }
}
BENCHMARK(bm_jaccard_loss)->Arg(96)->Arg(192);

}  // namespace

BENCHMARK_MAIN();
