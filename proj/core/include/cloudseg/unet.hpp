#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cloudseg/layers.hpp"
#include "cloudseg/rng.hpp"
#include "cloudseg/tensor.hpp"

namespace cloudseg::unet {

// Encoder-decoder with skip connections. Each encode block applies two 3x3
// convolutions with ReLU; 2x2 max pooling follows every encode block except
// the last (the bottleneck). Each decode block upsamples with a 2x2 stride-2
// transposed convolution, concatenates the matching encoder features, and
// applies two 3x3 convolutions. A 1x1 convolution plus sigmoid produces the
// per-pixel probability map.
struct NetworkConfig {
  int input_size = 192;
  int in_channels = 4;
  int base_channels = 32;
  int channel_cap = 1024;
  int encode_blocks = 6;
  int decode_blocks = 5;

  int encode_channels(int block) const {
    long long ch = static_cast<long long>(base_channels) << block;
    return static_cast<int>(std::min<long long>(ch, channel_cap));
  }

  /// Spatial size at encode level `block` (0 = input resolution).
  int level_size(int block) const { return input_size >> block; }

  void validate() const;

  bool operator==(const NetworkConfig&) const = default;
};

inline void NetworkConfig::validate() const {
  if (in_channels < 1) throw ConfigError("NetworkConfig: in_channels must be >= 1");
  if (base_channels < 1) throw ConfigError("NetworkConfig: base_channels must be >= 1");
  if (channel_cap < base_channels)
    throw ConfigError("NetworkConfig: channel_cap must be >= base_channels");
  if (encode_blocks < 2 || encode_blocks > 16)
    throw ConfigError("NetworkConfig: encode_blocks out of range");
  if (decode_blocks != encode_blocks - 1)
    throw ConfigError("NetworkConfig: decode_blocks must equal encode_blocks - 1");
  const int pools = encode_blocks - 1;
  const int factor = 1 << pools;
  if (input_size < factor || input_size % factor != 0)
    throw ConfigError("NetworkConfig: input_size must be a positive multiple of 2^" +
                      std::to_string(pools));
}

template <class T>
struct EncodeParams {
  layers::ConvKernel<T> conv1;
  layers::ConvKernel<T> conv2;
};

template <class T>
struct DecodeParams {
  layers::UpKernel<T> up;
  layers::ConvKernel<T> conv1;
  layers::ConvKernel<T> conv2;
};

template <class T>
struct ModelParams {
  NetworkConfig config;
  std::vector<EncodeParams<T>> encode;
  std::vector<DecodeParams<T>> decode;
  layers::ConvKernel<T> head;  // 1x1, one output channel
};

struct TensorInfo {
  std::string name;
  std::vector<std::uint32_t> dims;
  int fan_in = 0;
  bool is_bias = false;
};

// Visits every parameter tensor in a fixed order shared by initialization,
// the optimizer, and checkpoints. fn(const TensorInfo&, std::vector<T>&).
template <class Params, class Fn>
void visit_tensors(Params& params, Fn&& fn) {
  auto conv = [&fn](const std::string& base, auto& kernel) {
    const auto out = static_cast<std::uint32_t>(kernel.out_channels);
    const auto in = static_cast<std::uint32_t>(kernel.in_channels);
    const auto k = static_cast<std::uint32_t>(kernel.size);
    fn(TensorInfo{base + ".weight", {out, in, k, k},
                  kernel.in_channels * kernel.size * kernel.size, false},
       kernel.weights);
    fn(TensorInfo{base + ".bias", {out}, 0, true}, kernel.bias);
  };
  for (std::size_t i = 0; i < params.encode.size(); ++i) {
    const std::string base = "enc" + std::to_string(i);
    conv(base + ".conv1", params.encode[i].conv1);
    conv(base + ".conv2", params.encode[i].conv2);
  }
  for (std::size_t j = 0; j < params.decode.size(); ++j) {
    const std::string base = "dec" + std::to_string(j);
    auto& up = params.decode[j].up;
    // Stride-2 2x2 upsampling feeds each output from exactly one tap per
    // input channel, so fan-in is the channel count alone.
    fn(TensorInfo{base + ".up.weight",
                  {static_cast<std::uint32_t>(up.in_channels),
                   static_cast<std::uint32_t>(up.out_channels), 2, 2},
                  up.in_channels, false},
       up.weights);
    conv(base + ".conv1", params.decode[j].conv1);
    conv(base + ".conv2", params.decode[j].conv2);
  }
  conv("head", params.head);
}

/// Allocates zero-filled parameters with the channel ladder
/// min(base_channels * 2^i, channel_cap).
template <class T>
ModelParams<T> make_params(const NetworkConfig& cfg) {
  cfg.validate();
  ModelParams<T> p;
  p.config = cfg;
  int in_ch = cfg.in_channels;
  for (int i = 0; i < cfg.encode_blocks; ++i) {
    const int out_ch = cfg.encode_channels(i);
    p.encode.push_back({layers::ConvKernel<T>(out_ch, in_ch, 3),
                        layers::ConvKernel<T>(out_ch, out_ch, 3)});
    in_ch = out_ch;
  }
  int cur = in_ch;
  for (int j = 0; j < cfg.decode_blocks; ++j) {
    const int skip_ch = cfg.encode_channels(cfg.encode_blocks - 2 - j);
    p.decode.push_back({layers::UpKernel<T>(cur, skip_ch),
                        layers::ConvKernel<T>(skip_ch, 2 * skip_ch, 3),
                        layers::ConvKernel<T>(skip_ch, skip_ch, 3)});
    cur = skip_ch;
  }
  p.head = layers::ConvKernel<T>(1, cur, 1);
  return p;
}

enum class InitMode {
  fan_in,   // per-tensor bound sqrt(1 / fan_in)
  uniform,  // one fixed bound for every weight tensor
};

struct InitSpec {
  InitMode mode = InitMode::fan_in;
  double scale = 1.0;  // bound used in uniform mode
};

/// Weights drawn i.i.d. uniform on [-bound, +bound]; biases start at zero.
template <class T>
ModelParams<T> init_params(const NetworkConfig& cfg, std::uint64_t seed,
                           const InitSpec& spec = {}) {
  if (spec.scale <= 0) throw DomainError("init_params: scale must be positive");
  ModelParams<T> p = make_params<T>(cfg);
  Rng rng(seed);
  visit_tensors(p, [&](const TensorInfo& info, std::vector<T>& values) {
    if (info.is_bias) return;
    const double bound = spec.mode == InitMode::uniform
                             ? spec.scale
                             : std::sqrt(1.0 / info.fan_in);
    for (auto& v : values) v = static_cast<T>(rng.uniform(-bound, bound));
  });
  return p;
}

template <class T>
struct EncodeTrace {
  Tensor4<T> block_in;
  Tensor4<T> conv1_pre;
  Tensor4<T> conv1_out;
  Tensor4<T> conv2_pre;
  Tensor4<T> features;          // skip source
  layers::PoolResult<T> pool;   // unused for the bottleneck block
};

template <class T>
struct DecodeTrace {
  Tensor4<T> cat;
  Tensor4<T> conv1_pre;
  Tensor4<T> conv1_out;
  Tensor4<T> conv2_pre;
  Tensor4<T> features;
};

template <class T>
struct ForwardTape {
  NetworkConfig config;
  std::vector<EncodeTrace<T>> encode;
  std::vector<DecodeTrace<T>> decode;
  Tensor4<T> probability;
  bool consumed = false;
};

template <class T>
struct ForwardResult {
  Tensor4<T> probability;
  ForwardTape<T> tape;
};

template <class T>
ForwardResult<T> forward(const ModelParams<T>& params, const Tensor4<T>& input) {
  const NetworkConfig& cfg = params.config;
  if (input.channels != cfg.in_channels || input.height != cfg.input_size ||
      input.width != cfg.input_size)
    throw ShapeError("unet::forward: input " + input.shape_string() +
                     " does not match configured " + std::to_string(cfg.in_channels) +
                     "x" + std::to_string(cfg.input_size) + "x" +
                     std::to_string(cfg.input_size));

  ForwardTape<T> tape;
  tape.config = cfg;
  tape.encode.resize(cfg.encode_blocks);
  tape.decode.resize(cfg.decode_blocks);

  Tensor4<T> cur = input;
  for (int i = 0; i < cfg.encode_blocks; ++i) {
    EncodeTrace<T>& tr = tape.encode[i];
    tr.block_in = std::move(cur);
    tr.conv1_pre = layers::conv2d_forward(tr.block_in, params.encode[i].conv1);
    tr.conv1_out = layers::relu_forward(tr.conv1_pre);
    tr.conv2_pre = layers::conv2d_forward(tr.conv1_out, params.encode[i].conv2);
    tr.features = layers::relu_forward(tr.conv2_pre);
    if (tr.features.height != cfg.level_size(i) ||
        tr.features.channels != cfg.encode_channels(i))
      throw ShapeError("unet::forward: encode block " + std::to_string(i) +
                       " produced " + tr.features.shape_string());
    if (i + 1 < cfg.encode_blocks) {
      tr.pool = layers::maxpool2_forward(tr.features);
      cur = tr.pool.output;
    } else {
      cur = tr.features;
    }
  }
  for (int j = 0; j < cfg.decode_blocks; ++j) {
    DecodeTrace<T>& tr = tape.decode[j];
    const int skip_level = cfg.encode_blocks - 2 - j;
    Tensor4<T> up = layers::convtrans2_forward(cur, params.decode[j].up);
    tr.cat = layers::concat_channels(up, tape.encode[skip_level].features);
    tr.conv1_pre = layers::conv2d_forward(tr.cat, params.decode[j].conv1);
    tr.conv1_out = layers::relu_forward(tr.conv1_pre);
    tr.conv2_pre = layers::conv2d_forward(tr.conv1_out, params.decode[j].conv2);
    tr.features = layers::relu_forward(tr.conv2_pre);
    if (tr.features.height != cfg.level_size(skip_level))
      throw ShapeError("unet::forward: decode block " + std::to_string(j) +
                       " produced " + tr.features.shape_string());
    cur = tr.features;
  }
  Tensor4<T> head_pre = layers::conv2d_forward(tape.decode.back().features, params.head);
  tape.probability = layers::sigmoid_forward(head_pre);

  ForwardResult<T> result;
  result.probability = tape.probability;
  result.tape = std::move(tape);
  return result;
}

/// Gradients of a scalar loss with respect to every parameter, given
/// dL/d(probability). The tape is single-use.
template <class T>
ModelParams<T> backward(const ModelParams<T>& params, ForwardTape<T>& tape,
                        const Tensor4<T>& probability_grad) {
  if (tape.consumed) throw ContractError("unet::backward: tape already consumed");
  if (!(tape.config == params.config))
    throw ContractError("unet::backward: tape was recorded for a different config");
  require_same_shape(tape.probability, probability_grad, "unet::backward");
  tape.consumed = true;

  const NetworkConfig& cfg = params.config;
  ModelParams<T> grads = make_params<T>(cfg);

  Tensor4<T> g = layers::sigmoid_backward(tape.probability, probability_grad);
  {
    auto head = layers::conv2d_backward(tape.decode.back().features, params.head, g);
    grads.head = std::move(head.kernel);
    g = std::move(head.input);
  }

  std::vector<Tensor4<T>> skip_grads(cfg.encode_blocks);
  for (int j = cfg.decode_blocks - 1; j >= 0; --j) {
    DecodeTrace<T>& tr = tape.decode[j];
    Tensor4<T> g2 = layers::relu_backward(tr.conv2_pre, g);
    auto c2 = layers::conv2d_backward(tr.conv1_out, params.decode[j].conv2, g2);
    grads.decode[j].conv2 = std::move(c2.kernel);
    Tensor4<T> g1 = layers::relu_backward(tr.conv1_pre, c2.input);
    auto c1 = layers::conv2d_backward(tr.cat, params.decode[j].conv1, g1);
    grads.decode[j].conv1 = std::move(c1.kernel);
    auto [g_up, g_skip] = layers::split_channels(c1.input, params.decode[j].up.out_channels);
    const int skip_level = cfg.encode_blocks - 2 - j;
    skip_grads[skip_level] = std::move(g_skip);
    const Tensor4<T>& up_in =
        j == 0 ? tape.encode.back().features : tape.decode[j - 1].features;
    auto ub = layers::convtrans2_backward(up_in, params.decode[j].up, g_up);
    grads.decode[j].up = std::move(ub.kernel);
    g = std::move(ub.input);
  }

  for (int i = cfg.encode_blocks - 1; i >= 0; --i) {
    EncodeTrace<T>& tr = tape.encode[i];
    Tensor4<T> gf;
    if (i == cfg.encode_blocks - 1) {
      gf = std::move(g);
    } else {
      gf = layers::maxpool2_backward(tr.pool, g);
      const Tensor4<T>& sk = skip_grads[i];
      for (std::size_t n = 0; n < gf.size(); ++n) gf.values[n] += sk.values[n];
    }
    Tensor4<T> g2 = layers::relu_backward(tr.conv2_pre, gf);
    auto c2 = layers::conv2d_backward(tr.conv1_out, params.encode[i].conv2, g2);
    grads.encode[i].conv2 = std::move(c2.kernel);
    Tensor4<T> g1 = layers::relu_backward(tr.conv1_pre, c2.input);
    auto c1 = layers::conv2d_backward(tr.block_in, params.encode[i].conv1, g1);
    grads.encode[i].conv1 = std::move(c1.kernel);
    g = std::move(c1.input);
  }
  return grads;
}

}  // namespace cloudseg::unet
