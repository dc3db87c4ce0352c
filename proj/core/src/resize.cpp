#include "cloudseg/resize.hpp"

namespace cloudseg::pipeline {

Plane resize_bilinear(const Plane& plane, int out_width, int out_height) {
  if (plane.width <= 0 || plane.height <= 0 ||
      plane.values.size() != plane.pixel_count())
    throw ShapeError("resize_bilinear: malformed input plane");
  if (out_width <= 0 || out_height <= 0)
    throw ShapeError("resize_bilinear: output dimensions must be positive");

  if (out_width == plane.width && out_height == plane.height) return plane;

  const double sx = out_width > 1
                        ? static_cast<double>(plane.width - 1) / (out_width - 1)
                        : 0.0;
  const double sy = out_height > 1
                        ? static_cast<double>(plane.height - 1) / (out_height - 1)
                        : 0.0;

  Plane out(out_width, out_height);
  for (int oy = 0; oy < out_height; ++oy) {
    const double fy = oy * sy;
    int y0 = static_cast<int>(fy);
    if (y0 > plane.height - 2) y0 = plane.height > 1 ? plane.height - 2 : 0;
    const int y1 = plane.height > 1 ? y0 + 1 : 0;
    const double ty = fy - y0;
    for (int ox = 0; ox < out_width; ++ox) {
      const double fx = ox * sx;
      int x0 = static_cast<int>(fx);
      if (x0 > plane.width - 2) x0 = plane.width > 1 ? plane.width - 2 : 0;
      const int x1 = plane.width > 1 ? x0 + 1 : 0;
      const double tx = fx - x0;
      const double top = plane.at(y0, x0) + tx * (plane.at(y0, x1) - plane.at(y0, x0));
      const double bot = plane.at(y1, x0) + tx * (plane.at(y1, x1) - plane.at(y1, x0));
      out.at(oy, ox) = top + ty * (bot - top);
    }
  }
  return out;
}

}  // namespace cloudseg::pipeline
