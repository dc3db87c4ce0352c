#pragma once

#include <cmath>
#include <cstdint>

#include "cloudseg/rng.hpp"
#include "cloudseg/tensor.hpp"

namespace cloudseg::train {

// Random geometric transform drawn per sample: horizontal flip with p = 0.5,
// rotation by a uniform multiple of 90 degrees, and zoom-in by a uniform
// factor in [zoom_min, zoom_max] followed by a center crop back to size.
// Images resample bilinearly under zoom; masks use nearest-neighbor so they
// stay binary.
struct AugmentConfig {
  bool hflip = true;
  bool rotate90 = true;
  bool zoom = true;
  double zoom_min = 1.0;
  double zoom_max = 1.2;

  bool any() const { return hflip || rotate90 || zoom; }

  void validate() const {
    if (zoom_min < 1.0 || zoom_max < zoom_min)
      throw DomainError("AugmentConfig: need 1 <= zoom_min <= zoom_max");
  }
};

template <class T>
Tensor4<T> hflip(const Tensor4<T>& t) {
  Tensor4<T> out(t.batch, t.channels, t.height, t.width);
  for (int n = 0; n < t.batch; ++n)
    for (int c = 0; c < t.channels; ++c)
      for (int y = 0; y < t.height; ++y)
        for (int x = 0; x < t.width; ++x)
          out.at(n, c, y, x) = t.at(n, c, y, t.width - 1 - x);
  return out;
}

/// Counter-clockwise rotation by quarter_turns * 90 degrees.
template <class T>
Tensor4<T> rotate90(const Tensor4<T>& t, int quarter_turns) {
  const int k = ((quarter_turns % 4) + 4) % 4;
  if (k == 0) return t;
  const bool swap = k % 2 == 1;
  Tensor4<T> out(t.batch, t.channels, swap ? t.width : t.height,
                 swap ? t.height : t.width);
  for (int n = 0; n < t.batch; ++n) {
    for (int c = 0; c < t.channels; ++c) {
      for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
          int sy = 0, sx = 0;
          switch (k) {
            case 1: sy = x; sx = t.width - 1 - y; break;
            case 2: sy = t.height - 1 - y; sx = t.width - 1 - x; break;
            default: sy = t.height - 1 - x; sx = y; break;
          }
          out.at(n, c, y, x) = t.at(n, c, sy, sx);
        }
      }
    }
  }
  return out;
}

/// Zoom-in by `factor` >= 1 about the center, cropped back to the original
/// size. Bilinear sampling, or nearest-neighbor when `nearest` is set.
template <class T>
Tensor4<T> zoom_center(const Tensor4<T>& t, double factor, bool nearest) {
  if (factor < 1.0) throw DomainError("zoom_center: factor must be >= 1");
  if (factor == 1.0) return t;
  Tensor4<T> out(t.batch, t.channels, t.height, t.width);
  const double cy = (t.height - 1) / 2.0;
  const double cx = (t.width - 1) / 2.0;
  for (int y = 0; y < t.height; ++y) {
    const double sy = cy + (y - cy) / factor;
    for (int x = 0; x < t.width; ++x) {
      const double sx = cx + (x - cx) / factor;
      if (nearest) {
        const int iy = std::min<int>(t.height - 1, std::max<int>(0, static_cast<int>(std::llround(sy))));
        const int ix = std::min<int>(t.width - 1, std::max<int>(0, static_cast<int>(std::llround(sx))));
        for (int n = 0; n < t.batch; ++n)
          for (int c = 0; c < t.channels; ++c)
            out.at(n, c, y, x) = t.at(n, c, iy, ix);
      } else {
        const int y0 = std::min<int>(t.height - 1, static_cast<int>(sy));
        const int x0 = std::min<int>(t.width - 1, static_cast<int>(sx));
        const int y1 = std::min(y0 + 1, t.height - 1);
        const int x1 = std::min(x0 + 1, t.width - 1);
        const double fy = sy - y0, fx = sx - x0;
        for (int n = 0; n < t.batch; ++n) {
          for (int c = 0; c < t.channels; ++c) {
            const double a = static_cast<double>(t.at(n, c, y0, x0));
            const double b = static_cast<double>(t.at(n, c, y0, x1));
            const double d = static_cast<double>(t.at(n, c, y1, x0));
            const double e = static_cast<double>(t.at(n, c, y1, x1));
            const double top = a + fx * (b - a);
            const double bot = d + fx * (e - d);
            out.at(n, c, y, x) = static_cast<T>(top + fy * (bot - top));
          }
        }
      }
    }
  }
  return out;
}

template <class T>
struct AugmentedPair {
  Tensor4<T> image;
  Tensor4<T> mask;
};

/// Applies one randomly drawn transform identically to image and mask. Draws
/// happen only for enabled stages, in the fixed order flip, rotate, zoom.
template <class T>
AugmentedPair<T> augment(const Tensor4<T>& image, const Tensor4<T>& mask,
                         const AugmentConfig& cfg, Rng& rng) {
  cfg.validate();
  if (image.batch != mask.batch || image.height != mask.height ||
      image.width != mask.width)
    throw ShapeError("augment: image and mask shapes disagree");
  AugmentedPair<T> out{image, mask};
  if (cfg.hflip && rng.coin()) {
    out.image = hflip(out.image);
    out.mask = hflip(out.mask);
  }
  if (cfg.rotate90) {
    const int k = static_cast<int>(rng.below(4));
    if (k != 0) {
      out.image = rotate90(out.image, k);
      out.mask = rotate90(out.mask, k);
    }
  }
  if (cfg.zoom) {
    const double factor = rng.uniform(cfg.zoom_min, cfg.zoom_max);
    if (factor != 1.0) {
      out.image = zoom_center(out.image, factor, /*nearest=*/false);
      out.mask = zoom_center(out.mask, factor, /*nearest=*/true);
    }
  }
  return out;
}

template <class T>
AugmentedPair<T> augment(const Tensor4<T>& image, const Tensor4<T>& mask,
                         const AugmentConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  return augment(image, mask, cfg, rng);
}

}  // namespace cloudseg::train
