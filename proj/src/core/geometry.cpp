#include "hiper/core/geometry.hpp"

#include <algorithm>

namespace hiper {

double rect_iou(const PixelRect& a, const PixelRect& b) {
  if (a.degenerate() || b.degenerate()) return 0.0;
  const double iw = std::min(a.u_max, b.u_max) - std::max(a.u_min, b.u_min);
  const double ih = std::min(a.v_max, b.v_max) - std::max(a.v_min, b.v_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

}  // namespace hiper
