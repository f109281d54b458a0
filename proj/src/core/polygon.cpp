#include "hiper/core/polygon.hpp"

#include <algorithm>

namespace hiper {

double polygon_signed_area(const Polygon2& poly) {
  if (poly.size() < 3) return 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    acc += a.cross(b);
  }
  return 0.5 * acc;
}

double polygon_area(const Polygon2& poly) { return std::abs(polygon_signed_area(poly)); }

Vec2 polygon_centroid(const Polygon2& poly) {
  if (poly.empty()) return {};
  if (poly.size() < 3) {
    Vec2 acc;
    for (const auto& p : poly) acc = acc + p;
    return acc * (1.0 / poly.size());
  }
  double a = 0.0;
  Vec2 c;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    const double w = p.cross(q);
    a += w;
    c = c + (p + q) * w;
  }
  if (std::abs(a) < 1e-12) {
    Vec2 acc;
    for (const auto& p : poly) acc = acc + p;
    return acc * (1.0 / poly.size());
  }
  return c * (1.0 / (3.0 * a));
}

Polygon2 convex_hull(std::vector<Vec2> pts) {
  if (pts.size() < 3) return pts;
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 3) return pts;

  const auto turn = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a - o).cross(b - o);
  };
  std::vector<Vec2> hull(2 * pts.size());
  size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  const size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
    while (k >= lower && turn(hull[k - 2], hull[k - 1], *it) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

bool point_in_convex_polygon(const Polygon2& poly, const Vec2& p, double eps) {
  if (poly.size() < 3) return false;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    if ((b - a).cross(p - a) < -eps) return false;
  }
  return true;
}

namespace {

Polygon2 oriented_ccw(Polygon2 poly) {
  if (polygon_signed_area(poly) < 0) std::reverse(poly.begin(), poly.end());
  return poly;
}

}  // namespace

Polygon2 convex_intersection(const Polygon2& subject_in, const Polygon2& clipper_in) {
  if (subject_in.size() < 3 || clipper_in.size() < 3) return {};
  Polygon2 output = oriented_ccw(subject_in);
  const Polygon2 clipper = oriented_ccw(clipper_in);

  for (size_t ci = 0; ci < clipper.size() && !output.empty(); ++ci) {
    const Vec2 a = clipper[ci];
    const Vec2 b = clipper[(ci + 1) % clipper.size()];
    const Vec2 edge = b - a;

    Polygon2 input;
    input.swap(output);
    for (size_t i = 0; i < input.size(); ++i) {
      const Vec2 cur = input[i];
      const Vec2 nxt = input[(i + 1) % input.size()];
      const double dc = edge.cross(cur - a);
      const double dn = edge.cross(nxt - a);
      if (dc >= 0) {
        output.push_back(cur);
        if (dn < 0) {
          const double t = dc / (dc - dn);
          output.push_back(cur + (nxt - cur) * t);
        }
      } else if (dn >= 0) {
        const double t = dc / (dc - dn);
        output.push_back(cur + (nxt - cur) * t);
      }
    }
  }
  return output;
}

double convex_intersection_area(const Polygon2& a, const Polygon2& b) {
  return polygon_area(convex_intersection(a, b));
}

}  // namespace hiper
