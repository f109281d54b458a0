#pragma once

#include <optional>
#include <vector>

#include "hiper/core/grid.hpp"
#include "hiper/sim/world.hpp"

namespace hiper::bench {

struct PathResult {
  std::vector<Vec2> waypoints;  // cell centers, start to goal
  double cost = 0.0;            // accumulated traversal cost
};

// Static navigation grid from the world's walls and props, inflated by
// the robot radius. Floor and ceiling surfaces do not block.
Costmap build_costmap(const sim::WorldSpec& world, double resolution, double robot_radius);

// 8-connected A* with traversal cost step * (1 + cost_weight * cell).
// Start/goal snap to the nearest free cell within 0.6 m; unreachable
// goals give nullopt.
std::optional<PathResult> plan_path(const Costmap& map, const Vec2& start, const Vec2& goal,
                                    double cost_weight = 1.0 / 64.0);

// Serpentine sweep over free space, lanes along x. Used by the mapping
// phase and as the no-prior search strategy.
std::vector<Vec2> coverage_waypoints(const Costmap& map, double lane_spacing);

}  // namespace hiper::bench
