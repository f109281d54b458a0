#pragma once

#include <cstdint>
#include <vector>

#include "hiper/core/geometry.hpp"

namespace hiper {

// Geometry of a 2D grid anchored to the map frame (cell (0,0) is at origin).
struct GridGeometry {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double resolution = 0.05;
  int width = 0;
  int height = 0;

  int size() const { return width * height; }
  bool contains(int ix, int iy) const {
    return ix >= 0 && ix < width && iy >= 0 && iy < height;
  }
  int cell_x(double x) const { return static_cast<int>(std::floor((x - origin_x) / resolution)); }
  int cell_y(double y) const { return static_cast<int>(std::floor((y - origin_y) / resolution)); }
  double center_x(int ix) const { return origin_x + (ix + 0.5) * resolution; }
  double center_y(int iy) const { return origin_y + (iy + 0.5) * resolution; }

  bool operator==(const GridGeometry& o) const {
    return origin_x == o.origin_x && origin_y == o.origin_y && resolution == o.resolution &&
           width == o.width && height == o.height;
  }
};

template <typename T>
struct Grid {
  GridGeometry geom;
  std::vector<T> cells;

  Grid() = default;
  Grid(const GridGeometry& g, T fill = T{}) : geom(g), cells(g.size(), fill) {}

  T& at(int ix, int iy) { return cells[iy * geom.width + ix]; }
  const T& at(int ix, int iy) const { return cells[iy * geom.width + ix]; }
};

// Navigation cost scale: 0 free, 1..252 increasing penalty, 254 lethal.
using Costmap = Grid<float>;
inline constexpr float kLethalCost = 254.0f;
inline constexpr float kMaxNonLethalCost = 253.0f;

}  // namespace hiper
