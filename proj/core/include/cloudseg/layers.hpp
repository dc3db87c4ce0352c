#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "cloudseg/tensor.hpp"

namespace cloudseg::layers {

// Filter bank for 'same'-padded square convolutions. Block convolutions are
// 3x3; the network head uses 1x1. Weight layout [out][in][ky][kx].
template <class T>
struct ConvKernel {
  int out_channels = 0;
  int in_channels = 0;
  int size = 0;
  std::vector<T> weights;
  std::vector<T> bias;

  ConvKernel() = default;
  ConvKernel(int out_ch, int in_ch, int k)
      : out_channels(out_ch), in_channels(in_ch), size(k) {
    if (out_ch <= 0 || in_ch <= 0 || (k != 1 && k != 3))
      throw ShapeError("ConvKernel: bad dimensions");
    weights.assign(static_cast<std::size_t>(out_ch) * in_ch * k * k, T(0));
    bias.assign(static_cast<std::size_t>(out_ch), T(0));
  }

  T& w(int o, int c, int ky, int kx) {
    return weights[((static_cast<std::size_t>(o) * in_channels + c) * size + ky) * size + kx];
  }
  const T& w(int o, int c, int ky, int kx) const {
    return weights[((static_cast<std::size_t>(o) * in_channels + c) * size + ky) * size + kx];
  }
};

// 2x2 stride-2 transposed-convolution kernel, no bias. Layout [in][out][u][v].
template <class T>
struct UpKernel {
  int in_channels = 0;
  int out_channels = 0;
  std::vector<T> weights;

  UpKernel() = default;
  UpKernel(int in_ch, int out_ch) : in_channels(in_ch), out_channels(out_ch) {
    if (in_ch <= 0 || out_ch <= 0) throw ShapeError("UpKernel: bad dimensions");
    weights.assign(static_cast<std::size_t>(in_ch) * out_ch * 4, T(0));
  }

  T& w(int c, int o, int u, int v) {
    return weights[((static_cast<std::size_t>(c) * out_channels + o) * 2 + u) * 2 + v];
  }
  const T& w(int c, int o, int u, int v) const {
    return weights[((static_cast<std::size_t>(c) * out_channels + o) * 2 + u) * 2 + v];
  }
};

template <class T>
Tensor4<T> conv2d_forward(const Tensor4<T>& x, const ConvKernel<T>& k) {
  if (x.channels != k.in_channels)
    throw ShapeError("conv2d_forward: input has " + std::to_string(x.channels) +
                     " channels, kernel expects " + std::to_string(k.in_channels));
  const int pad = k.size / 2;
  const int h = x.height, w = x.width;
  Tensor4<T> out(x.batch, k.out_channels, h, w);
  for (int n = 0; n < x.batch; ++n) {
    for (int o = 0; o < k.out_channels; ++o) {
      T* op = out.plane(n, o);
      std::fill(op, op + static_cast<std::size_t>(h) * w, k.bias[o]);
      for (int c = 0; c < k.in_channels; ++c) {
        const T* xp = x.plane(n, c);
        for (int ky = 0; ky < k.size; ++ky) {
          const int dy = ky - pad;
          const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
          for (int kx = 0; kx < k.size; ++kx) {
            const int dx = kx - pad;
            const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
            const T wv = k.w(o, c, ky, kx);
            for (int y = y0; y < y1; ++y) {
              T* orow = op + static_cast<std::size_t>(y) * w;
              const T* xrow = xp + static_cast<std::size_t>(y + dy) * w + dx;
              for (int xx = x0; xx < x1; ++xx) orow[xx] += wv * xrow[xx];
            }
          }
        }
      }
    }
  }
  return out;
}

template <class T>
struct ConvBackward {
  Tensor4<T> input;      // dL/dx
  ConvKernel<T> kernel;  // dL/dW and dL/db in kernel layout
};

template <class T>
ConvBackward<T> conv2d_backward(const Tensor4<T>& x, const ConvKernel<T>& k,
                                const Tensor4<T>& upstream) {
  if (x.channels != k.in_channels || upstream.channels != k.out_channels ||
      upstream.batch != x.batch || upstream.height != x.height ||
      upstream.width != x.width)
    throw ShapeError("conv2d_backward: shape mismatch");
  const int pad = k.size / 2;
  const int h = x.height, w = x.width;
  ConvBackward<T> result{Tensor4<T>(x.batch, x.channels, h, w), ConvKernel<T>(k.out_channels, k.in_channels, k.size)};
  for (int n = 0; n < x.batch; ++n) {
    for (int o = 0; o < k.out_channels; ++o) {
      const T* up = upstream.plane(n, o);
      T bsum = T(0);
      for (std::size_t i = 0; i < static_cast<std::size_t>(h) * w; ++i) bsum += up[i];
      result.kernel.bias[o] += bsum;
      for (int c = 0; c < k.in_channels; ++c) {
        T* gx = result.input.plane(n, c);
        const T* xp = x.plane(n, c);
        for (int ky = 0; ky < k.size; ++ky) {
          const int dy = ky - pad;
          const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
          for (int kx = 0; kx < k.size; ++kx) {
            const int dx = kx - pad;
            const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
            const T wv = k.w(o, c, ky, kx);
            T wsum = T(0);
            for (int y = y0; y < y1; ++y) {
              const T* uprow = up + static_cast<std::size_t>(y) * w;
              const T* xrow = xp + static_cast<std::size_t>(y + dy) * w + dx;
              T* gxrow = gx + static_cast<std::size_t>(y + dy) * w + dx;
              for (int xx = x0; xx < x1; ++xx) {
                gxrow[xx] += wv * uprow[xx];
                wsum += uprow[xx] * xrow[xx];
              }
            }
            result.kernel.w(o, c, ky, kx) += wsum;
          }
        }
      }
    }
  }
  return result;
}

// 2x2 stride-2 max pooling. argmax holds, per output element, the linear
// index of the winning input; ties go to the first element in row-major
// window order.
template <class T>
struct PoolResult {
  Tensor4<T> output;
  std::vector<std::size_t> argmax;
  int in_height = 0;
  int in_width = 0;
};

template <class T>
PoolResult<T> maxpool2_forward(const Tensor4<T>& x) {
  if (x.height % 2 != 0 || x.width % 2 != 0)
    throw ShapeError("maxpool2_forward: spatial dims must be even, got " + x.shape_string());
  const int oh = x.height / 2, ow = x.width / 2;
  PoolResult<T> result{Tensor4<T>(x.batch, x.channels, oh, ow), {}, x.height, x.width};
  result.argmax.resize(result.output.size());
  std::size_t oi = 0;
  for (int n = 0; n < x.batch; ++n) {
    for (int c = 0; c < x.channels; ++c) {
      for (int y = 0; y < oh; ++y) {
        for (int xx = 0; xx < ow; ++xx, ++oi) {
          std::size_t best = x.offset(n, c, 2 * y, 2 * xx);
          T bestv = x.values[best];
          const std::size_t cand[3] = {x.offset(n, c, 2 * y, 2 * xx + 1),
                                       x.offset(n, c, 2 * y + 1, 2 * xx),
                                       x.offset(n, c, 2 * y + 1, 2 * xx + 1)};
          for (std::size_t idx : cand) {
            if (x.values[idx] > bestv) {
              bestv = x.values[idx];
              best = idx;
            }
          }
          result.output.values[oi] = bestv;
          result.argmax[oi] = best;
        }
      }
    }
  }
  return result;
}

template <class T>
Tensor4<T> maxpool2_backward(const PoolResult<T>& pooled, const Tensor4<T>& upstream) {
  require_same_shape(pooled.output, upstream, "maxpool2_backward");
  Tensor4<T> gx(upstream.batch, upstream.channels, pooled.in_height, pooled.in_width);
  for (std::size_t i = 0; i < upstream.size(); ++i)
    gx.values[pooled.argmax[i]] += upstream.values[i];
  return gx;
}

template <class T>
Tensor4<T> convtrans2_forward(const Tensor4<T>& x, const UpKernel<T>& k) {
  if (x.channels != k.in_channels)
    throw ShapeError("convtrans2_forward: channel mismatch");
  const int oh = x.height * 2, ow = x.width * 2;
  Tensor4<T> out(x.batch, k.out_channels, oh, ow);
  for (int n = 0; n < x.batch; ++n) {
    for (int o = 0; o < k.out_channels; ++o) {
      T* op = out.plane(n, o);
      for (int c = 0; c < k.in_channels; ++c) {
        const T* xp = x.plane(n, c);
        for (int u = 0; u < 2; ++u) {
          for (int v = 0; v < 2; ++v) {
            const T wv = k.w(c, o, u, v);
            for (int y = 0; y < x.height; ++y) {
              const T* xrow = xp + static_cast<std::size_t>(y) * x.width;
              T* orow = op + static_cast<std::size_t>(2 * y + u) * ow + v;
              for (int xx = 0; xx < x.width; ++xx) orow[2 * xx] += wv * xrow[xx];
            }
          }
        }
      }
    }
  }
  return out;
}

template <class T>
struct UpBackward {
  Tensor4<T> input;
  UpKernel<T> kernel;
};

template <class T>
UpBackward<T> convtrans2_backward(const Tensor4<T>& x, const UpKernel<T>& k,
                                  const Tensor4<T>& upstream) {
  if (x.channels != k.in_channels || upstream.channels != k.out_channels ||
      upstream.batch != x.batch || upstream.height != 2 * x.height ||
      upstream.width != 2 * x.width)
    throw ShapeError("convtrans2_backward: shape mismatch");
  UpBackward<T> result{Tensor4<T>(x.batch, x.channels, x.height, x.width),
                       UpKernel<T>(k.in_channels, k.out_channels)};
  const int ow = upstream.width;
  for (int n = 0; n < x.batch; ++n) {
    for (int o = 0; o < k.out_channels; ++o) {
      const T* up = upstream.plane(n, o);
      for (int c = 0; c < k.in_channels; ++c) {
        T* gx = result.input.plane(n, c);
        const T* xp = x.plane(n, c);
        for (int u = 0; u < 2; ++u) {
          for (int v = 0; v < 2; ++v) {
            const T wv = k.w(c, o, u, v);
            T wsum = T(0);
            for (int y = 0; y < x.height; ++y) {
              const T* uprow = up + static_cast<std::size_t>(2 * y + u) * ow + v;
              const T* xrow = xp + static_cast<std::size_t>(y) * x.width;
              T* gxrow = gx + static_cast<std::size_t>(y) * x.width;
              for (int xx = 0; xx < x.width; ++xx) {
                gxrow[xx] += wv * uprow[2 * xx];
                wsum += xrow[xx] * uprow[2 * xx];
              }
            }
            result.kernel.w(c, o, u, v) += wsum;
          }
        }
      }
    }
  }
  return result;
}

template <class T>
Tensor4<T> relu_forward(const Tensor4<T>& x) {
  Tensor4<T> out(x.batch, x.channels, x.height, x.width);
  for (std::size_t i = 0; i < x.size(); ++i)
    out.values[i] = x.values[i] > T(0) ? x.values[i] : T(0);
  return out;
}

/// `x` is the forward input; upstream passes where x > 0.
template <class T>
Tensor4<T> relu_backward(const Tensor4<T>& x, const Tensor4<T>& upstream) {
  require_same_shape(x, upstream, "relu_backward");
  Tensor4<T> gx(x.batch, x.channels, x.height, x.width);
  for (std::size_t i = 0; i < x.size(); ++i)
    gx.values[i] = x.values[i] > T(0) ? upstream.values[i] : T(0);
  return gx;
}

template <class T>
T stable_sigmoid(T v) {
  if (v >= T(0)) return T(1) / (T(1) + std::exp(-v));
  const T e = std::exp(v);
  return e / (T(1) + e);
}

template <class T>
Tensor4<T> sigmoid_forward(const Tensor4<T>& x) {
  Tensor4<T> out(x.batch, x.channels, x.height, x.width);
  for (std::size_t i = 0; i < x.size(); ++i)
    out.values[i] = stable_sigmoid(x.values[i]);
  return out;
}

/// `y` is the forward output; dL/dx = upstream * y * (1 - y).
template <class T>
Tensor4<T> sigmoid_backward(const Tensor4<T>& y, const Tensor4<T>& upstream) {
  require_same_shape(y, upstream, "sigmoid_backward");
  Tensor4<T> gx(y.batch, y.channels, y.height, y.width);
  for (std::size_t i = 0; i < y.size(); ++i)
    gx.values[i] = upstream.values[i] * y.values[i] * (T(1) - y.values[i]);
  return gx;
}

/// Channel concatenation, a's channels first.
template <class T>
Tensor4<T> concat_channels(const Tensor4<T>& a, const Tensor4<T>& b) {
  if (a.batch != b.batch || a.height != b.height || a.width != b.width)
    throw ShapeError("concat_channels: shape mismatch (" + a.shape_string() +
                     " vs " + b.shape_string() + ")");
  Tensor4<T> out(a.batch, a.channels + b.channels, a.height, a.width);
  const std::size_t plane = static_cast<std::size_t>(a.height) * a.width;
  for (int n = 0; n < a.batch; ++n) {
    std::copy(a.plane(n, 0), a.plane(n, 0) + plane * a.channels, out.plane(n, 0));
    std::copy(b.plane(n, 0), b.plane(n, 0) + plane * b.channels,
              out.plane(n, a.channels));
  }
  return out;
}

/// Inverse of concat_channels: first `leading` channels and the rest.
template <class T>
std::pair<Tensor4<T>, Tensor4<T>> split_channels(const Tensor4<T>& x, int leading) {
  if (leading <= 0 || leading >= x.channels)
    throw ShapeError("split_channels: bad split point");
  Tensor4<T> a(x.batch, leading, x.height, x.width);
  Tensor4<T> b(x.batch, x.channels - leading, x.height, x.width);
  const std::size_t plane = static_cast<std::size_t>(x.height) * x.width;
  for (int n = 0; n < x.batch; ++n) {
    std::copy(x.plane(n, 0), x.plane(n, 0) + plane * leading, a.plane(n, 0));
    std::copy(x.plane(n, leading), x.plane(n, leading) + plane * b.channels,
              b.plane(n, 0));
  }
  return {std::move(a), std::move(b)};
}

}  // namespace cloudseg::layers
