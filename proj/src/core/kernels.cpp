#include "hiper/core/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace hiper::kernels {

namespace {

// 21 bits per axis, offset to keep negative cells positive.
inline uint64_t voxel_key(const Vec3& p, double inv_leaf) {
  const auto q = [&](double v) {
    return static_cast<uint64_t>(static_cast<int64_t>(std::floor(v * inv_leaf)) + (1 << 20));
  };
  return (q(p.x) << 42) | (q(p.y) << 21) | q(p.z);
}

struct VoxelGroups {
  std::vector<int32_t> flat;     // point indices grouped per voxel
  std::vector<int32_t> starts;   // group start offsets, size = voxels + 1
};

// Grouping itself is serial so voxel order (first occurrence) is fixed;
// the per-voxel centroid loop is what parallelizes.
VoxelGroups group_by_voxel(std::span<const Vec3> points, double leaf) {
  const double inv_leaf = 1.0 / leaf;
  std::unordered_map<uint64_t, int32_t> index;
  index.reserve(points.size());
  std::vector<int32_t> voxel_of(points.size());
  std::vector<int32_t> counts;
  for (size_t i = 0; i < points.size(); ++i) {
    const uint64_t key = voxel_key(points[i], inv_leaf);
    auto [it, inserted] = index.try_emplace(key, static_cast<int32_t>(counts.size()));
    if (inserted) counts.push_back(0);
    voxel_of[i] = it->second;
    ++counts[it->second];
  }
  VoxelGroups g;
  g.starts.resize(counts.size() + 1, 0);
  for (size_t v = 0; v < counts.size(); ++v) g.starts[v + 1] = g.starts[v] + counts[v];
  g.flat.resize(points.size());
  std::vector<int32_t> cursor(g.starts.begin(), g.starts.end() - 1);
  for (size_t i = 0; i < points.size(); ++i) g.flat[cursor[voxel_of[i]]++] = static_cast<int32_t>(i);
  return g;
}

Vec3 centroid_of_group(std::span<const Vec3> points, const VoxelGroups& g, size_t v) {
  Vec3 acc;
  const int32_t a = g.starts[v], b = g.starts[v + 1];
  for (int32_t k = a; k < b; ++k) acc += points[g.flat[k]];
  return acc * (1.0 / (b - a));
}

struct CellHashGrid {
  double inv_cell;
  std::unordered_map<uint64_t, std::vector<int32_t>> cells;

  CellHashGrid(std::span<const Vec3> points, double cell) : inv_cell(1.0 / cell) {
    for (size_t i = 0; i < points.size(); ++i)
      cells[voxel_key(points[i], inv_cell)].push_back(static_cast<int32_t>(i));
  }

  template <typename F>
  void for_neighborhood(const Vec3& p, F&& f) const {
    const int64_t cx = static_cast<int64_t>(std::floor(p.x * inv_cell));
    const int64_t cy = static_cast<int64_t>(std::floor(p.y * inv_cell));
    const int64_t cz = static_cast<int64_t>(std::floor(p.z * inv_cell));
    for (int64_t dx = -1; dx <= 1; ++dx)
      for (int64_t dy = -1; dy <= 1; ++dy)
        for (int64_t dz = -1; dz <= 1; ++dz) {
          const uint64_t key = ((static_cast<uint64_t>(cx + dx + (1 << 20))) << 42) |
                               ((static_cast<uint64_t>(cy + dy + (1 << 20))) << 21) |
                               (static_cast<uint64_t>(cz + dz + (1 << 20)));
          const auto it = cells.find(key);
          if (it != cells.end()) f(it->second);
        }
  }
};

void neighbors_of(std::span<const Vec3> points, const CellHashGrid& grid, double r2, int32_t i,
                  std::vector<int32_t>& out) {
  out.clear();
  const Vec3& p = points[i];
  grid.for_neighborhood(p, [&](const std::vector<int32_t>& bucket) {
    for (const int32_t j : bucket) {
      if (j == i) continue;
      if ((points[j] - p).squared_norm() <= r2) out.push_back(j);
    }
  });
  std::sort(out.begin(), out.end());
}

double splat_cell_value(const GridGeometry& geom, std::span<const Vec2> points, double sigma,
                        double cutoff, int ix, int iy) {
  const double cx = geom.center_x(ix);
  const double cy = geom.center_y(iy);
  const double inv_two_s2 = 1.0 / (2.0 * sigma * sigma);
  const double cut2 = cutoff * cutoff;
  double acc = 0.0;
  for (const auto& p : points) {
    const double dx = p.x - cx, dy = p.y - cy;
    const double d2 = dx * dx + dy * dy;
    if (d2 > cut2) continue;
    acc += std::exp(-d2 * inv_two_s2);
  }
  return acc;
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be > 0");
}

}  // namespace

std::vector<Vec3> transform_points(std::span<const Vec3> points, const Transform& t) {
  std::vector<Vec3> out(points.size());
  const int64_t n = static_cast<int64_t>(points.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) out[i] = t.apply(points[i]);
  return out;
}

size_t plane_inlier_mask(std::span<const Vec3> points, const Plane& plane, double threshold,
                         std::vector<uint8_t>& mask) {
  mask.assign(points.size(), 0);
  const int64_t n = static_cast<int64_t>(points.size());
  int64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
  for (int64_t i = 0; i < n; ++i) {
    if (std::abs(plane.signed_distance(points[i])) <= threshold) {
      mask[i] = 1;
      ++count;
    }
  }
  return static_cast<size_t>(count);
}

void inside_box_mask(std::span<const Vec3> points, std::span<const OrientedBox> boxes,
                     double margin, std::vector<uint8_t>& mask) {
  mask.assign(points.size(), 0);
  const int64_t n = static_cast<int64_t>(points.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    for (const auto& box : boxes) {
      if (box.contains(points[i], margin)) {
        mask[i] = 1;
        break;
      }
    }
  }
}

std::vector<Vec3> voxel_downsample(std::span<const Vec3> points, double leaf) {
  check_positive(leaf, "leaf");
  const VoxelGroups g = group_by_voxel(points, leaf);
  const int64_t voxels = static_cast<int64_t>(g.starts.size()) - 1;
  std::vector<Vec3> out(voxels);
#pragma omp parallel for schedule(static)
  for (int64_t v = 0; v < voxels; ++v) out[v] = centroid_of_group(points, g, v);
  return out;
}

std::vector<std::vector<int32_t>> radius_neighbors(std::span<const Vec3> points, double radius) {
  check_positive(radius, "radius");
  const CellHashGrid grid(points, radius);
  const double r2 = radius * radius;
  std::vector<std::vector<int32_t>> out(points.size());
  const int64_t n = static_cast<int64_t>(points.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (int64_t i = 0; i < n; ++i) neighbors_of(points, grid, r2, static_cast<int32_t>(i), out[i]);
  return out;
}

void splat_gaussian(const GridGeometry& geom, std::span<const Vec2> points, double sigma,
                    double cutoff_sigmas, std::vector<double>& cells) {
  check_positive(sigma, "sigma");
  cells.assign(geom.size(), 0.0);
  const double cutoff = cutoff_sigmas * sigma;
  const int64_t n = static_cast<int64_t>(geom.size());
#pragma omp parallel for schedule(static)
  for (int64_t c = 0; c < n; ++c) {
    const int ix = static_cast<int>(c) % geom.width;
    const int iy = static_cast<int>(c) / geom.width;
    cells[c] = splat_cell_value(geom, points, sigma, cutoff, ix, iy);
  }
}

namespace serial {

std::vector<Vec3> transform_points(std::span<const Vec3> points, const Transform& t) {
  std::vector<Vec3> out(points.size());
  for (size_t i = 0; i < points.size(); ++i) out[i] = t.apply(points[i]);
  return out;
}

size_t plane_inlier_mask(std::span<const Vec3> points, const Plane& plane, double threshold,
                         std::vector<uint8_t>& mask) {
  mask.assign(points.size(), 0);
  size_t count = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    if (std::abs(plane.signed_distance(points[i])) <= threshold) {
      mask[i] = 1;
      ++count;
    }
  }
  return count;
}

void inside_box_mask(std::span<const Vec3> points, std::span<const OrientedBox> boxes,
                     double margin, std::vector<uint8_t>& mask) {
  mask.assign(points.size(), 0);
  for (size_t i = 0; i < points.size(); ++i) {
    for (const auto& box : boxes) {
      if (box.contains(points[i], margin)) {
        mask[i] = 1;
        break;
      }
    }
  }
}

std::vector<Vec3> voxel_downsample(std::span<const Vec3> points, double leaf) {
  check_positive(leaf, "leaf");
  const VoxelGroups g = group_by_voxel(points, leaf);
  const size_t voxels = g.starts.size() - 1;
  std::vector<Vec3> out(voxels);
  for (size_t v = 0; v < voxels; ++v) out[v] = centroid_of_group(points, g, v);
  return out;
}

std::vector<std::vector<int32_t>> radius_neighbors(std::span<const Vec3> points, double radius) {
  check_positive(radius, "radius");
  const CellHashGrid grid(points, radius);
  const double r2 = radius * radius;
  std::vector<std::vector<int32_t>> out(points.size());
  for (size_t i = 0; i < points.size(); ++i)
    neighbors_of(points, grid, r2, static_cast<int32_t>(i), out[i]);
  return out;
}

void splat_gaussian(const GridGeometry& geom, std::span<const Vec2> points, double sigma,
                    double cutoff_sigmas, std::vector<double>& cells) {
  check_positive(sigma, "sigma");
  cells.assign(geom.size(), 0.0);
  const double cutoff = cutoff_sigmas * sigma;
  for (int c = 0; c < geom.size(); ++c) {
    const int ix = c % geom.width;
    const int iy = c / geom.width;
    cells[c] = splat_cell_value(geom, points, sigma, cutoff, ix, iy);
  }
}

}  // namespace serial

}  // namespace hiper::kernels
