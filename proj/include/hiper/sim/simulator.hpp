#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hiper/core/geometry.hpp"
#include "hiper/core/rng.hpp"
#include "hiper/sim/world.hpp"

namespace hiper::sim {

struct CameraConfig {
  int image_width = 1280;
  int image_height = 720;
  double hfov = 1.0472;  // 60 deg
  double vfov = 0.9;     // ~51.5 deg
  double max_range = 5.0;
  int rays_u = 160;
  int rays_v = 120;
  double mount_height = 1.2;
  double mount_forward = 0.1;
  double mount_pitch = 0.17;  // tilt down, radians

  CameraIntrinsics intrinsics() const {
    CameraIntrinsics k;
    k.width = image_width;
    k.height = image_height;
    k.fx = (image_width / 2.0) / std::tan(hfov / 2.0);
    k.fy = (image_height / 2.0) / std::tan(vfov / 2.0);
    k.cx = image_width / 2.0;
    k.cy = image_height / 2.0;
    return k;
  }
  // Camera frame in the robot frame: z forward, x right, y down.
  Transform mount() const {
    const Mat3 axes = Mat3::from_columns({0, -1, 0}, {0, 0, -1}, {1, 0, 0});
    return Transform{axes * Mat3::from_x_rotation(-mount_pitch),
                     {mount_forward, 0.0, mount_height}};
  }
};

struct DetectorConfig {
  double pixel_sigma = 2.0;
  double p_false_negative = 0.1;
  double p_false_positive = 0.02;
  double max_range = 10.0;
  double min_box_px = 6.0;
};

struct SimConfig {
  CameraConfig camera;
  DetectorConfig detector;
  double max_speed = 0.9;
  double max_correction = 0.5;  // pose-graph translation bound per event
};

struct Detection2D {
  std::string class_label;
  PixelRect box;
  double score = 1.0;
  // Ground-truth provenance for oracles; never serialized.
  // >=0 object id, -1 clutter, -(100+id) agent, -(1000+idx) decoy.
  int truth = -1;
};

inline int detection_truth_agent(int agent_id) { return -(100 + agent_id); }
inline int detection_truth_decoy(int decoy_index) { return -(1000 + decoy_index); }

// Per-point provenance codes in SensorFrame::point_source.
inline constexpr int kSourceObjectBase = 10000;
inline constexpr int kSourceAgentBase = 20000;

struct SensorFrame {
  double t = 0.0;
  int node_id = 0;
  Transform camera_pose;  // applies camera-frame coordinates into map frame
  std::vector<Vec3> points;  // camera frame
  std::vector<Detection2D> detections;
  std::vector<int> point_source;  // surface index, or object/agent base + id
};

struct PoseGraph {
  std::map<int, Transform> nodes;  // robot pose in map frame per node id
  int epoch = 0;
};

struct OptimizationEvent {
  int epoch = 0;
  Transform correction;
  int node_from = 0;
  int node_to = 0;
};

class Simulator {
 public:
  Simulator(WorldSpec world, SimConfig cfg);

  // Advances agents and the robot; dt <= 0 throws std::invalid_argument.
  void step(double dt);

  // Ray-samples the scene and emulates the 2D detector. Registers one
  // pose-graph node per frame.
  SensorFrame render_frame();

  OptimizationEvent inject_optimization(const Transform& correction, int node_from, int node_to);

  // Robot control.
  void set_speed(double v);
  void set_path(std::vector<Vec2> waypoints);
  void clear_path();
  bool path_done() const { return path_.empty(); }
  void teleport(const Pose2& pose) { robot_ = pose; }

  // Rotate in place by the given angle before resuming path motion.
  void set_spin(double radians) { spin_left_ = radians; }
  bool spinning() const { return spin_left_ > 1e-9; }

  // Spawning is deferred so the mapping phase can run without dynamics.
  void spawn_agents();
  bool agents_spawned() const { return agents_spawned_; }

  // Phase continuation: later phases keep clock and node ids monotone
  // with respect to an earlier phase's pose graph.
  void set_clock(double t0) { t_ = std::max(t_, t0); }
  void set_node_start(int node_id) { next_node_ = std::max(next_node_, node_id); }

  double time() const { return t_; }
  Pose2 robot_pose() const { return robot_; }
  const WorldSpec& world() const { return world_; }
  const SimConfig& config() const { return cfg_; }
  const PoseGraph& pose_graph() const { return graph_; }

  std::vector<Vec2> agent_positions() const;
  Vec3 object_position(int id) const;

 private:
  struct AgentState {
    Vec2 position;
    size_t next_waypoint = 0;
    double dwell_left = 0.0;
    Vec2 goal;
    bool has_goal = false;
    Rng rng{0};
  };

  struct RayHit {
    double dist = -1.0;
    int source = -1;
  };

  RayHit cast_ray(const Vec3& origin, const Vec3& dir, double max_range) const;
  void advance_agent(const AgentSpec& spec, AgentState& st, double dt);
  void emit_detections(SensorFrame& frame, const Transform& cam_to_map);

  WorldSpec world_;
  SimConfig cfg_;
  Pose2 robot_;
  double speed_command_ = 0.0;
  double spin_left_ = 0.0;
  double spin_rate_ = 1.5;  // rad/s
  std::deque<Vec2> path_;
  std::vector<AgentState> agents_;
  bool agents_spawned_ = false;
  double t_ = 0.0;
  double last_frame_t_ = -1.0;
  int next_node_ = 0;
  PoseGraph graph_;
  Rng detector_rng_;
};

}  // namespace hiper::sim
