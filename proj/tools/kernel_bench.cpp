// Times the OpenMP kernels against their serial references on
// synthetic workloads and checks that outputs stay identical.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "hiper/core/kernels.hpp"
#include "hiper/core/rng.hpp"

using namespace hiper;

namespace {

double seconds_of(const std::function<void()>& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-22s serial %8.3f ms   omp %8.3f ms   speedup %4.2fx   identical %s\n", name,
              serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s, identical ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without openmp; both columns run serial code\n");
#endif

  Rng rng(42);
  const int n = 200000;
  std::vector<Vec3> points(n);
  for (auto& p : points) p = {rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(0, 3)};

  const Transform t{Mat3::from_yaw(0.7), {1.0, -2.0, 0.3}};
  {
    std::vector<Vec3> a, b;
    const double ts = seconds_of([&] { a = kernels::serial::transform_points(points, t); }, 5);
    const double tp = seconds_of([&] { b = kernels::transform_points(points, t); }, 5);
    bool same = a.size() == b.size();
    for (size_t i = 0; same && i < a.size(); ++i)
      same = a[i].x == b[i].x && a[i].y == b[i].y && a[i].z == b[i].z;
    report("transform_points", ts, tp, same);
  }
  {
    const Plane plane{Vec3{0, 0, 1}, 1.0};
    std::vector<uint8_t> ma, mb;
    size_t ca = 0, cb = 0;
    const double ts =
        seconds_of([&] { ca = kernels::serial::plane_inlier_mask(points, plane, 0.05, ma); }, 5);
    const double tp =
        seconds_of([&] { cb = kernels::plane_inlier_mask(points, plane, 0.05, mb); }, 5);
    report("plane_inlier_mask", ts, tp, ca == cb && ma == mb);
  }
  {
    std::vector<OrientedBox> boxes;
    for (int i = 0; i < 24; ++i) {
      boxes.push_back({{rng.uniform(-8, 8), rng.uniform(-8, 8), 1.0},
                       Mat3::from_yaw(rng.uniform(0, 3.14)),
                       {0.8, 0.5, 1.0}});
    }
    std::vector<uint8_t> ma, mb;
    const double ts =
        seconds_of([&] { kernels::serial::inside_box_mask(points, boxes, 0.05, ma); }, 5);
    const double tp = seconds_of([&] { kernels::inside_box_mask(points, boxes, 0.05, mb); }, 5);
    report("inside_box_mask", ts, tp, ma == mb);
  }
  {
    std::vector<Vec3> a, b;
    const double ts = seconds_of([&] { a = kernels::serial::voxel_downsample(points, 0.1); }, 5);
    const double tp = seconds_of([&] { b = kernels::voxel_downsample(points, 0.1); }, 5);
    bool same = a.size() == b.size();
    for (size_t i = 0; same && i < a.size(); ++i)
      same = a[i].x == b[i].x && a[i].y == b[i].y && a[i].z == b[i].z;
    report("voxel_downsample", ts, tp, same);
  }
  {
    std::vector<Vec3> cloud(points.begin(), points.begin() + 20000);
    std::vector<std::vector<int32_t>> a, b;
    const double ts = seconds_of([&] { a = kernels::serial::radius_neighbors(cloud, 0.25); }, 3);
    const double tp = seconds_of([&] { b = kernels::radius_neighbors(cloud, 0.25); }, 3);
    report("radius_neighbors", ts, tp, a == b);
  }
  {
    GridGeometry geom;
    geom.origin_x = -10;
    geom.origin_y = -10;
    geom.resolution = 0.1;
    geom.width = 200;
    geom.height = 200;
    std::vector<Vec2> traj(3000);
    for (auto& p : traj) p = {rng.uniform(-9, 9), rng.uniform(-9, 9)};
    std::vector<double> a, b;
    const double ts =
        seconds_of([&] { kernels::serial::splat_gaussian(geom, traj, 0.3, 3.0, a); }, 3);
    const double tp = seconds_of([&] { kernels::splat_gaussian(geom, traj, 0.3, 3.0, b); }, 3);
    report("splat_gaussian", ts, tp, a == b);
  }
  return 0;
}
