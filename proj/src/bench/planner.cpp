#include "hiper/bench/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace hiper::bench {

namespace {

bool footprint_hit(const sim::WorldSpec& world, double x, double y, double radius) {
  for (const auto& s : world.surfaces) {
    const double nz = std::abs(s.normal.z);
    if (nz > 0.9) {
      // Horizontal structure blocks only at driving height (tables).
      if (s.center.z < 0.15 || s.center.z > 1.6) continue;
      const auto [u, v] = s.plane().basis();
      const Vec3 rel{x - s.center.x, y - s.center.y, 0.0};
      const double lu = u.dot(rel), lv = v.dot(rel);
      if (std::abs(lu) <= s.extents.x / 2.0 + radius &&
          std::abs(lv) <= s.extents.y / 2.0 + radius)
        return true;
      continue;
    }
    // Wall: distance to the footprint segment along the horizontal axis.
    const auto [u, v] = s.plane().basis();
    (void)v;
    const Vec2 dir{u.x, u.y};
    const double len = dir.norm();
    if (len < 1e-9) continue;
    const Vec2 d = dir * (1.0 / len);
    const Vec2 rel{x - s.center.x, y - s.center.y};
    const double along = std::clamp(rel.dot(d), -s.extents.x / 2.0, s.extents.x / 2.0);
    const Vec2 closest{s.center.x + d.x * along, s.center.y + d.y * along};
    const double dist = (Vec2{x, y} - closest).norm();
    if (dist <= 0.05 + radius) return true;
  }
  for (const auto& o : world.objects) {
    const Mat3 r = Mat3::from_yaw(-o.yaw);
    const Vec3 local = r * (Vec3{x, y, o.position.z} - o.position);
    if (std::abs(local.x) <= o.size.x / 2.0 + radius &&
        std::abs(local.y) <= o.size.y / 2.0 + radius)
      return true;
  }
  return false;
}

}  // namespace

Costmap build_costmap(const sim::WorldSpec& world, double resolution, double robot_radius) {
  GridGeometry geom;
  geom.origin_x = world.map_bounds.lo.x;
  geom.origin_y = world.map_bounds.lo.y;
  geom.resolution = resolution;
  geom.width = static_cast<int>(std::ceil((world.map_bounds.hi.x - world.map_bounds.lo.x) / resolution));
  geom.height = static_cast<int>(std::ceil((world.map_bounds.hi.y - world.map_bounds.lo.y) / resolution));
  Costmap map(geom, 0.0f);

  for (int iy = 0; iy < geom.height; ++iy) {
    for (int ix = 0; ix < geom.width; ++ix) {
      const double x = geom.center_x(ix);
      const double y = geom.center_y(iy);
      const bool border = ix == 0 || iy == 0 || ix == geom.width - 1 || iy == geom.height - 1;
      if (border || footprint_hit(world, x, y, robot_radius)) {
        map.at(ix, iy) = kLethalCost;
      } else if (footprint_hit(world, x, y, robot_radius + 0.2)) {
        map.at(ix, iy) = 80.0f;  // soft shoulder next to obstacles
      }
    }
  }
  return map;
}

namespace {

std::optional<std::pair<int, int>> snap_free(const Costmap& map, const Vec2& p, double max_snap) {
  const auto& g = map.geom;
  const int cx = g.cell_x(p.x);
  const int cy = g.cell_y(p.y);
  const int r = std::max(1, static_cast<int>(std::ceil(max_snap / g.resolution)));
  std::optional<std::pair<int, int>> best;
  double best_d = 1e30;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const int ix = cx + dx, iy = cy + dy;
      if (!g.contains(ix, iy)) continue;
      if (map.at(ix, iy) >= kLethalCost) continue;
      const double d = std::hypot(g.center_x(ix) - p.x, g.center_y(iy) - p.y);
      if (d < best_d) {
        best_d = d;
        best = {ix, iy};
      }
    }
  }
  if (best && best_d <= max_snap + g.resolution) return best;
  return std::nullopt;
}

}  // namespace

std::optional<PathResult> plan_path(const Costmap& map, const Vec2& start, const Vec2& goal,
                                    double cost_weight) {
  const auto& g = map.geom;
  const auto s = snap_free(map, start, 0.6);
  const auto t = snap_free(map, goal, 0.6);
  if (!s || !t) return std::nullopt;

  const int n = g.size();
  std::vector<double> dist(n, 1e30);
  std::vector<int> prev(n, -1);
  const auto idx = [&](int ix, int iy) { return iy * g.width + ix; };
  const int start_i = idx(s->first, s->second);
  const int goal_i = idx(t->first, t->second);
  const double gx = g.center_x(t->first), gy = g.center_y(t->second);

  using Entry = std::pair<double, int>;  // f, cell
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist[start_i] = 0.0;
  open.push({0.0, start_i});
  const int dxs[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  const int dys[8] = {0, 0, 1, -1, 1, -1, 1, -1};

  while (!open.empty()) {
    const auto [f, cur] = open.top();
    open.pop();
    if (cur == goal_i) break;
    const int cx = cur % g.width;
    const int cy = cur / g.width;
    const double base = dist[cur];
    if (f > base + std::hypot(g.center_x(cx) - gx, g.center_y(cy) - gy) + 1e-9) continue;
    for (int k = 0; k < 8; ++k) {
      const int nx = cx + dxs[k], ny = cy + dys[k];
      if (!g.contains(nx, ny)) continue;
      const float cell = map.at(nx, ny);
      if (cell >= kLethalCost) continue;
      const double step = (k < 4 ? 1.0 : M_SQRT2) * g.resolution;
      const double nd = base + step * (1.0 + cost_weight * cell);
      const int ni = idx(nx, ny);
      if (nd + 1e-12 < dist[ni]) {
        dist[ni] = nd;
        prev[ni] = cur;
        const double h = std::hypot(g.center_x(nx) - gx, g.center_y(ny) - gy);
        open.push({nd + h, ni});
      }
    }
  }
  if (dist[goal_i] >= 1e30) return std::nullopt;

  PathResult result;
  result.cost = dist[goal_i];
  std::vector<int> chain;
  for (int cur = goal_i; cur != -1; cur = prev[cur]) chain.push_back(cur);
  std::reverse(chain.begin(), chain.end());
  for (const int c : chain)
    result.waypoints.push_back({g.center_x(c % g.width), g.center_y(c / g.width)});
  return result;
}

std::vector<Vec2> coverage_waypoints(const Costmap& map, double lane_spacing) {
  const auto& g = map.geom;
  std::vector<Vec2> out;
  const int stride = std::max(1, static_cast<int>(std::lround(lane_spacing / g.resolution)));
  bool reverse = false;
  // Lanes run top-down so the sweep starts at the map's north edge.
  for (int iy = g.height - 2; iy >= 1; iy -= stride) {
    int first = -1, last = -1;
    for (int ix = 1; ix < g.width - 1; ++ix) {
      if (map.at(ix, iy) < kLethalCost) {
        if (first < 0) first = ix;
        last = ix;
      }
    }
    if (first < 0) continue;
    Vec2 a{g.center_x(first), g.center_y(iy)};
    Vec2 b{g.center_x(last), g.center_y(iy)};
    if (reverse) std::swap(a, b);
    out.push_back(a);
    out.push_back(b);
    reverse = !reverse;
  }
  return out;
}

}  // namespace hiper::bench
