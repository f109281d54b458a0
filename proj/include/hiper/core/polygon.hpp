#pragma once

#include <vector>

#include "hiper/core/geometry.hpp"

namespace hiper {

using Polygon2 = std::vector<Vec2>;

// Signed shoelace area; counter-clockwise polygons are positive.
double polygon_signed_area(const Polygon2& poly);
double polygon_area(const Polygon2& poly);

Vec2 polygon_centroid(const Polygon2& poly);

// Andrew monotone chain; returns CCW hull without repeated endpoint.
Polygon2 convex_hull(std::vector<Vec2> points);

bool point_in_convex_polygon(const Polygon2& poly, const Vec2& p, double eps = 1e-9);

// Sutherland-Hodgman clip of a convex subject against a convex clipper.
Polygon2 convex_intersection(const Polygon2& subject, const Polygon2& clipper);

double convex_intersection_area(const Polygon2& a, const Polygon2& b);

}  // namespace hiper
