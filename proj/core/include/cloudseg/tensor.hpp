#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cloudseg/errors.hpp"

namespace cloudseg {

namespace detail {

inline std::size_t checked_volume(int batch, int channels, int height, int width) {
  if (batch <= 0 || channels <= 0 || height <= 0 || width <= 0)
    throw ShapeError("Tensor4: dimensions must be positive");
  return static_cast<std::size_t>(batch) * static_cast<std::size_t>(channels) *
         static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
}

}  // namespace detail

// Dense (batch, channel, height, width) array, row-major with width fastest.
template <class T>
struct Tensor4 {
  int batch = 0;
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<T> values;

  Tensor4() = default;
  Tensor4(int n, int c, int h, int w, T fill = T(0))
      : batch(n),
        channels(c),
        height(h),
        width(w),
        values(detail::checked_volume(n, c, h, w), fill) {}

  std::size_t size() const { return values.size(); }

  std::size_t offset(int n, int c, int y, int x) const {
    return ((static_cast<std::size_t>(n) * channels + c) * height + y) * width + x;
  }

  T& at(int n, int c, int y, int x) { return values[offset(n, c, y, x)]; }
  const T& at(int n, int c, int y, int x) const { return values[offset(n, c, y, x)]; }

  T* plane(int n, int c) { return values.data() + offset(n, c, 0, 0); }
  const T* plane(int n, int c) const { return values.data() + offset(n, c, 0, 0); }

  bool same_shape(const Tensor4& other) const {
    return batch == other.batch && channels == other.channels &&
           height == other.height && width == other.width;
  }

  std::string shape_string() const {
    return std::to_string(batch) + "x" + std::to_string(channels) + "x" +
           std::to_string(height) + "x" + std::to_string(width);
  }

  /// Copy of batch entry `n` as a single-sample tensor.
  Tensor4 batch_slice(int n) const {
    Tensor4 out(1, channels, height, width);
    const std::size_t stride = size() / batch;
    std::copy(values.begin() + n * stride, values.begin() + (n + 1) * stride,
              out.values.begin());
    return out;
  }
};

template <class T>
void require_same_shape(const Tensor4<T>& a, const Tensor4<T>& b, const char* what) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(what) + ": shape mismatch (" + a.shape_string() +
                     " vs " + b.shape_string() + ")");
}

}  // namespace cloudseg
