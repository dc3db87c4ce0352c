#pragma once

#include "cloudseg/tiling.hpp"

namespace cloudseg::pipeline {

/// Corner-aligned bilinear resampling: output corners sample input corners
/// exactly, interior coordinates scale by (in-1)/(out-1). A single-pixel
/// output axis samples coordinate 0. Output values never leave the hull of
/// their four source pixels, and a constant plane stays constant.
Plane resize_bilinear(const Plane& plane, int out_width, int out_height);

}  // namespace cloudseg::pipeline
