#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace hiper {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double squared_norm() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(squared_norm()); }
  Vec3 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
  }
  Vec2 xy() const { return {x, y}; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Row-major 3x3 rotation matrix.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }
  static Mat3 from_yaw(double yaw) {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return Mat3{{c, -s, 0, s, c, 0, 0, 0, 1}};
  }
  static Mat3 from_pitch(double pitch) {
    const double c = std::cos(pitch), s = std::sin(pitch);
    return Mat3{{c, 0, s, 0, 1, 0, -s, 0, c}};
  }
  static Mat3 from_x_rotation(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return Mat3{{1, 0, 0, 0, c, -s, 0, s, c}};
  }
  static Mat3 from_columns(const Vec3& a, const Vec3& b, const Vec3& c) {
    return Mat3{{a.x, b.x, c.x, a.y, b.y, c.y, a.z, b.z, c.z}};
  }

  Vec3 col(int i) const { return {m[i], m[3 + i], m[6 + i]}; }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int k = 0; k < 3; ++k) s += m[i * 3 + k] * o.m[k * 3 + j];
        r.m[i * 3 + j] = s;
      }
    return r;
  }
  Mat3 transposed() const {
    return Mat3{{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
  }
};

// Rigid transform: x_out = R * x + t.
struct Transform {
  Mat3 rotation;
  Vec3 translation;

  static Transform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 rotate(const Vec3& v) const { return rotation * v; }

  Transform compose(const Transform& inner) const {
    return {rotation * inner.rotation, rotation * inner.translation + translation};
  }
  Transform inverse() const {
    const Mat3 rt = rotation.transposed();
    return {rt, -(rt * translation)};
  }
};

// Planar robot pose: position on the floor plane plus heading.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  Transform to_transform() const {
    return {Mat3::from_yaw(yaw), {x, y, 0.0}};
  }
  Vec2 position() const { return {x, y}; }
};

struct Aabb {
  Vec3 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
          std::numeric_limits<double>::max()};
  Vec3 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
          std::numeric_limits<double>::lowest()};

  static Aabb from_center_size(const Vec3& center, const Vec3& size) {
    const Vec3 h = size * 0.5;
    return {center - h, center + h};
  }

  bool valid() const { return lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }
  Vec3 center() const { return (lo + hi) * 0.5; }
  Vec3 size() const { return hi - lo; }
  double volume() const {
    const Vec3 s = size();
    return s.x * s.y * s.z;
  }
  void expand(const Vec3& p) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
  }
  void expand(const Aabb& b) {
    expand(b.lo);
    expand(b.hi);
  }
  Aabb inflated(double m) const {
    return {{lo.x - m, lo.y - m, lo.z - m}, {hi.x + m, hi.y + m, hi.z + m}};
  }
  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z &&
           p.z <= hi.z;
  }
  bool intersects(const Aabb& o) const {
    return lo.x <= o.hi.x && hi.x >= o.lo.x && lo.y <= o.hi.y && hi.y >= o.lo.y &&
           lo.z <= o.hi.z && hi.z >= o.lo.z;
  }
};

// Box with arbitrary orientation; axes columns are unit and orthogonal.
struct OrientedBox {
  Vec3 center;
  Mat3 axes;
  Vec3 half_extents;

  bool contains(const Vec3& p, double margin = 0.0) const {
    const Vec3 d = p - center;
    const Vec3 local{axes.col(0).dot(d), axes.col(1).dot(d), axes.col(2).dot(d)};
    return std::abs(local.x) <= half_extents.x + margin &&
           std::abs(local.y) <= half_extents.y + margin &&
           std::abs(local.z) <= half_extents.z + margin;
  }

  std::array<Vec3, 8> corners() const {
    std::array<Vec3, 8> out;
    int k = 0;
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        for (int sz : {-1, 1})
          out[k++] = center + axes.col(0) * (sx * half_extents.x) +
                     axes.col(1) * (sy * half_extents.y) +
                     axes.col(2) * (sz * half_extents.z);
    return out;
  }

  Aabb aabb() const {
    Aabb b;
    for (const auto& c : corners()) b.expand(c);
    return b;
  }
};

inline OrientedBox transformed(const OrientedBox& box, const Transform& t) {
  return {t.apply(box.center), t.rotation * box.axes, box.half_extents};
}

inline Aabb transform_aabb(const Aabb& box, const Transform& t) {
  Aabb out;
  for (int sx : {0, 1})
    for (int sy : {0, 1})
      for (int sz : {0, 1})
        out.expand(t.apply({sx ? box.hi.x : box.lo.x, sy ? box.hi.y : box.lo.y,
                            sz ? box.hi.z : box.lo.z}));
  return out;
}

// Infinite plane n.dot(x) = offset with unit normal.
struct Plane {
  Vec3 normal{0, 0, 1};
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }

  // Deterministic sign convention: the largest-magnitude normal component is
  // made positive so equal planes fitted from different samples compare equal.
  Plane canonical() const {
    const double ax = std::abs(normal.x), ay = std::abs(normal.y), az = std::abs(normal.z);
    double lead = normal.z;
    if (ax >= ay && ax >= az) lead = normal.x;
    else if (ay >= ax && ay >= az) lead = normal.y;
    if (lead < 0.0) return {-normal, -offset};
    return *this;
  }

  // Orthonormal in-plane axes, a deterministic function of the normal.
  std::pair<Vec3, Vec3> basis() const {
    Vec3 u = normal.cross(Vec3{0, 0, 1});
    if (u.norm() < 1e-6) u = normal.cross(Vec3{1, 0, 0});
    u = u.normalized();
    const Vec3 v = normal.cross(u).normalized();
    return {u, v};
  }

  Vec2 to_plane(const Vec3& p, const Vec3& u, const Vec3& v) const {
    return {u.dot(p), v.dot(p)};
  }
  Vec3 from_plane(const Vec2& q, const Vec3& u, const Vec3& v) const {
    return u * q.x + v * q.y + normal * offset;
  }
};

// Pinhole model, z forward / x right / y down, pixel origin top-left.
struct CameraIntrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  std::optional<Vec2> project(const Vec3& p_cam) const {
    if (p_cam.z <= 1e-9) return std::nullopt;
    return Vec2{fx * p_cam.x / p_cam.z + cx, fy * p_cam.y / p_cam.z + cy};
  }
};

// Pixel-space rectangle, used for detections and projected blobs.
struct PixelRect {
  double u_min = 0, v_min = 0, u_max = 0, v_max = 0;

  double width() const { return std::max(0.0, u_max - u_min); }
  double height() const { return std::max(0.0, v_max - v_min); }
  double area() const { return width() * height(); }
  bool degenerate() const { return area() <= 0.0; }
};

double rect_iou(const PixelRect& a, const PixelRect& b);

inline double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace hiper
