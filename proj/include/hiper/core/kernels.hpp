#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hiper/core/geometry.hpp"
#include "hiper/core/grid.hpp"

// Data-parallel inner loops of the perception pipeline. Every kernel is
// written so each output element is computed independently in a fixed
// order; the OpenMP versions therefore produce bit-identical results to
// the serial references in kernels::serial, which stay around for tests
// and for the kernel benchmark tool.

namespace hiper::kernels {

std::vector<Vec3> transform_points(std::span<const Vec3> points, const Transform& t);

// mask[i] = 1 when |signed distance| <= threshold; returns inlier count.
size_t plane_inlier_mask(std::span<const Vec3> points, const Plane& plane, double threshold,
                         std::vector<uint8_t>& mask);

// mask[i] = 1 when the point lies inside any box inflated by margin.
void inside_box_mask(std::span<const Vec3> points, std::span<const OrientedBox> boxes,
                     double margin, std::vector<uint8_t>& mask);

// One centroid per occupied voxel, voxels ordered by first occurrence.
std::vector<Vec3> voxel_downsample(std::span<const Vec3> points, double leaf);

// Indices of all points within radius of each point (self excluded),
// ascending per list. Uniform-grid accelerated.
std::vector<std::vector<int32_t>> radius_neighbors(std::span<const Vec3> points, double radius);

// Adds an isotropic Gaussian kernel per point to the cell grid; point
// contributions beyond cutoff_sigmas are skipped.
void splat_gaussian(const GridGeometry& geom, std::span<const Vec2> points, double sigma,
                    double cutoff_sigmas, std::vector<double>& cells);

namespace serial {

std::vector<Vec3> transform_points(std::span<const Vec3> points, const Transform& t);
size_t plane_inlier_mask(std::span<const Vec3> points, const Plane& plane, double threshold,
                         std::vector<uint8_t>& mask);
void inside_box_mask(std::span<const Vec3> points, std::span<const OrientedBox> boxes,
                     double margin, std::vector<uint8_t>& mask);
std::vector<Vec3> voxel_downsample(std::span<const Vec3> points, double leaf);
std::vector<std::vector<int32_t>> radius_neighbors(std::span<const Vec3> points, double radius);
void splat_gaussian(const GridGeometry& geom, std::span<const Vec2> points, double sigma,
                    double cutoff_sigmas, std::vector<double>& cells);

}  // namespace serial

}  // namespace hiper::kernels
