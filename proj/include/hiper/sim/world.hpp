#pragma once

#include <map>
#include <string>
#include <vector>

#include "hiper/core/geometry.hpp"

namespace hiper::sim {

// Static rectangular surface (wall, floor, ceiling, table top).
struct SurfaceSpec {
  Vec3 center;
  Vec3 normal{0, 0, 1};
  Vec2 extents;  // full side lengths along the plane basis
  std::string true_class = "unknown";

  Plane plane() const {
    const Vec3 n = normal.normalized();
    return Plane{n, n.dot(center)};
  }
};

// Flat picture that triggers 2D detections but adds no 3D structure
// of its own (it lies flush on a wall).
struct DecoySpec {
  Vec3 center;
  Vec3 normal{0, 1, 0};
  Vec2 extents;
  std::string detect_as = "person";
};

// Movable rigid prop (bottle, cart, box...).
struct ObjectSpec {
  int id = 0;
  std::string class_label;
  Vec3 size;       // full box extents in the object frame
  Vec3 position;   // box center in map frame
  double yaw = 0.0;
};

struct Waypoint {
  Vec2 position;
  double dwell_seconds = 0.0;
};

struct AgentSpec {
  int id = 0;
  std::string class_label = "person";
  std::vector<Waypoint> script;
  double speed = 0.6;
  bool random_walk = false;
  Vec3 size{0.5, 0.5, 1.7};
  Vec2 start;
};

struct WorldSpec {
  std::string name;
  uint64_t seed = 0;
  Aabb map_bounds;
  std::vector<SurfaceSpec> surfaces;
  std::vector<DecoySpec> decoys;
  std::vector<ObjectSpec> objects;
  std::vector<AgentSpec> agents;
  std::map<std::string, Vec2> keypoints;
  std::map<std::string, Aabb> regions;

  // Throws std::invalid_argument when an invariant is broken: non-unit
  // normals, waypoints outside map bounds, negative speeds.
  void validate() const;
};

WorldSpec load_world(const std::string& path);
void save_world(const WorldSpec& world, const std::string& path);
std::string world_to_json(const WorldSpec& world);
WorldSpec world_from_json(const std::string& text);

}  // namespace hiper::sim
