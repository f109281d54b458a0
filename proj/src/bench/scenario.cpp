#include "hiper/bench/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <set>
#include <sstream>

#include "hiper/interp/features.hpp"

namespace hiper::bench {

namespace {

Transform robot_pose_from_frame(const sim::SensorFrame& frame, const sim::CameraConfig& camera) {
  return frame.camera_pose.compose(camera.mount().inverse());
}

// Ground truth for the static/dynamic split: an observation counts as
// correctly static when its geometry matches a static world surface and
// as wrong when it lies on a movable prop.
// Ground truth for the static/dynamic split: an observation counts as
// wrongly static when the bulk of its contour lies on a movable prop.
bool observation_is_static_truth(const sim::WorldSpec& world, const std::vector<Vec3>& contour) {
  if (contour.empty()) return true;
  for (const auto& o : world.objects) {
    const Mat3 r = Mat3::from_yaw(-o.yaw);
    const Vec3 h = o.size * 0.5;
    size_t inside = 0;
    for (const auto& p : contour) {
      const Vec3 local = r * (p - o.position);
      if (std::abs(local.x) <= h.x + 0.05 && std::abs(local.y) <= h.y + 0.05 &&
          std::abs(local.z) <= h.z + 0.05)
        ++inside;
    }
    if (2 * inside >= contour.size()) return false;
  }
  return true;
}

double mapping_precision(const kb::KnowledgeBase& store, const sim::WorldSpec& world) {
  size_t total = 0, correct = 0;
  const auto& poses = store.node_poses();
  for (const auto& doc : store.documents()) {
    const auto* obs = std::get_if<BackgroundObservation>(&doc.payload);
    if (obs == nullptr || obs->synthetic) continue;
    const auto it = poses.find(obs->node_id);
    if (it == poses.end()) continue;
    std::vector<Vec3> contour;
    for (const auto& p : obs->contour_points_3d()) contour.push_back(it->second.apply(p));
    ++total;
    if (observation_is_static_truth(world, contour)) ++correct;
  }
  return total == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(total);
}

struct PathFollower {
  std::vector<Vec2> goals;
  size_t next = 0;

  bool exhausted() const { return next >= goals.size(); }
  std::optional<Vec2> pop() {
    if (exhausted()) return std::nullopt;
    return goals[next++];
  }
};

// False when the goal is unreachable; callers skip such goals rather
// than cutting through geometry.
bool drive_to(sim::Simulator& sim, const Costmap& traversal, const Vec2& goal, double speed) {
  const auto path = plan_path(traversal, {sim.robot_pose().x, sim.robot_pose().y}, goal);
  if (!path) return false;
  sim.set_path(path->waypoints);
  sim.set_speed(speed);
  return true;
}

}  // namespace

BenchSetup BenchSetup::for_world(const sim::WorldSpec& world, const Config& cfg) {
  BenchSetup setup;
  setup.world = world;
  setup.pipeline = PipelineParams::from_config(cfg);
  setup.sim_config.camera.rays_u = cfg.get_int("sim", "rays_u", setup.sim_config.camera.rays_u);
  setup.sim_config.camera.rays_v = cfg.get_int("sim", "rays_v", setup.sim_config.camera.rays_v);
  setup.sim_config.camera.max_range =
      cfg.get_double("sim", "max_range", setup.sim_config.camera.max_range);
  setup.sim_config.detector.pixel_sigma =
      cfg.get_double("sim", "detector_pixel_sigma", setup.sim_config.detector.pixel_sigma);
  setup.sim_config.detector.p_false_negative =
      cfg.get_double("sim", "detector_p_fn", setup.sim_config.detector.p_false_negative);
  setup.sim_config.detector.p_false_positive =
      cfg.get_double("sim", "detector_p_fp", setup.sim_config.detector.p_false_positive);
  setup.costmap_resolution = cfg.get_double("bench", "costmap_resolution", setup.costmap_resolution);
  setup.frame_dt = cfg.get_double("bench", "frame_dt", setup.frame_dt);
  setup.task_timeout = cfg.get_double("bench", "task_timeout", setup.task_timeout);
  setup.coverage_lane_spacing =
      cfg.get_double("bench", "coverage_lane_spacing", setup.coverage_lane_spacing);
  setup.task_speed = cfg.get_double("bench", "task_speed", setup.task_speed);
  setup.mapping_speed = cfg.get_double("bench", "mapping_speed", setup.mapping_speed);
  return setup;
}

MappingResult initial_mapping(const BenchSetup& setup, kb::KnowledgeBase& store,
                              Costmap* costmap_out) {
  const auto wall_start = std::chrono::steady_clock::now();
  MappingResult result;

  sim::Simulator sim(setup.world, setup.sim_config);  // dynamics stay unspawned
  const Costmap costmap =
      build_costmap(setup.world, setup.costmap_resolution, setup.robot_radius);
  if (costmap_out != nullptr) *costmap_out = costmap;

  Perception percep(AblationConfig::by_id("C2"), setup.pipeline, &store);

  // First frame anchors the synthetic floor/ceiling.
  sim.set_speed(setup.mapping_speed);
  sim.step(setup.frame_dt);
  {
    const auto frame = sim.render_frame();
    store.set_node_pose(frame.node_id, robot_pose_from_frame(frame, setup.sim_config.camera));
    background::inject_synthetic_planes(setup.world.map_bounds, frame.node_id, frame.t,
                                        setup.pipeline.background, store);
    percep.process_background(frame, setup.sim_config.camera);
    ++result.frames;
  }

  PathFollower sweep{coverage_waypoints(costmap, setup.coverage_lane_spacing), 0};
  while (!sweep.exhausted()) {
    const auto goal = sweep.pop();
    if (!drive_to(sim, costmap, *goal, setup.mapping_speed)) continue;
    int guard = 0;
    while (!sim.path_done() && ++guard < 4000) {
      sim.step(setup.frame_dt);
      const auto frame = sim.render_frame();
      store.set_node_pose(frame.node_id, robot_pose_from_frame(frame, setup.sim_config.camera));
      percep.process_background(frame, setup.sim_config.camera);
      ++result.frames;
    }
  }

  // Environment meta and the spatial-map layer document.
  {
    EnvironmentInfo env;
    env.environment_id = setup.world.name;
    env.costmap_ref = "costmap.pgm";
    kb::Document doc;
    doc.uuid = "env-" + setup.world.name;
    doc.layer = kb::Layer::environment;
    doc.kind = kb::Kind::meta;
    doc.frame = "map";
    doc.last_update = sim.time();
    doc.class_label = "environment";
    doc.payload = env;
    store.upsert(std::move(doc));

    MapInfo map_info;
    map_info.costmap_ref = "costmap.pgm";
    map_info.cloud_ref = "registered-cloud";
    kb::Document map_doc;
    map_doc.uuid = "map-" + setup.world.name;
    map_doc.layer = kb::Layer::spatial_map;
    map_doc.kind = kb::Kind::map;
    map_doc.frame = "map";
    map_doc.last_update = sim.time();
    map_doc.class_label = "map";
    map_doc.payload = map_info;
    store.upsert(std::move(map_doc));
  }

  result.sim_seconds = sim.time();
  result.precision_static = mapping_precision(store, setup.world);
  for (const auto& doc : store.documents()) {
    if (doc.layer != kb::Layer::background) continue;
    if (doc.kind == kb::Kind::observation) ++result.observations;
    if (doc.kind == kb::Kind::instance) ++result.instances;
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return result;
}

LongtermResult run_longterm(const BenchSetup& setup, const AblationConfig& config, double minutes,
                            kb::KnowledgeBase& store) {
  LongtermResult result;
  sim::Simulator sim(setup.world, setup.sim_config);
  int max_node = -1;
  double max_t = 0.0;
  for (const auto& [id, pose] : store.node_poses()) max_node = std::max(max_node, id);
  for (const auto& doc : store.documents()) max_t = std::max(max_t, doc.last_update);
  sim.set_node_start(max_node + 1);
  sim.set_clock(max_t + 1.0);
  sim.spawn_agents();

  const Costmap costmap =
      build_costmap(setup.world, setup.costmap_resolution, setup.robot_radius);
  Perception percep(config, setup.pipeline, &store);

  const double t_end = sim.time() + minutes * 60.0;
  PathFollower sweep{coverage_waypoints(costmap, setup.coverage_lane_spacing), 0};
  while (sim.time() < t_end) {
    if (sim.path_done()) {
      for (int tries = 0; tries < 8; ++tries) {
        if (sweep.exhausted()) sweep.next = 0;  // patrol loops the sweep
        if (drive_to(sim, costmap, *sweep.pop(), setup.mapping_speed)) break;
      }
    }
    sim.step(setup.frame_dt);
    const auto frame = sim.render_frame();
    store.set_node_pose(frame.node_id, robot_pose_from_frame(frame, setup.sim_config.camera));
    percep.process_foreground(frame, setup.sim_config.camera);
    ++result.frames;
  }
  percep.tracker().flush(store);

  if (config.feature_learning)
    result.fitted_classes = interp::learn_features(store, sim.time(), setup.pipeline.features);
  if (config.heatmaps) {
    for (const auto& doc : store.documents()) {
      if (doc.kind == kb::Kind::instance && std::holds_alternative<TrackInstance>(doc.payload) &&
          doc.class_label != "unknown")
        if (std::find(result.heatmap_classes.begin(), result.heatmap_classes.end(),
                      doc.class_label) == result.heatmap_classes.end())
          result.heatmap_classes.push_back(doc.class_label);
    }
  }
  result.sim_seconds = sim.time();
  return result;
}

std::map<std::string, interp::Heatmap> generate_class_heatmaps(const kb::KnowledgeBase& store,
                                                               const GridGeometry& geom,
                                                               double t_from, double t_to,
                                                               const interp::HeatmapParams& params) {
  std::set<std::string> classes;
  for (const auto& doc : store.documents()) {
    if (doc.kind == kb::Kind::instance && std::holds_alternative<TrackInstance>(doc.payload) &&
        doc.class_label != "unknown")
      classes.insert(doc.class_label);
  }
  std::map<std::string, interp::Heatmap> out;
  for (const auto& c : classes)
    out.emplace(c, interp::generate_heatmap(store, c, t_from, t_to, geom, false, params));
  return out;
}

uint64_t run_seed(const std::string& world, const std::string& config, const std::string& task,
                  int run_index) {
  uint64_t h = 1469598103934665603ULL;
  const auto mix = [&h](const std::string& s) {
    for (const char c : s) {
      h ^= static_cast<uint64_t>(static_cast<unsigned char>(c));
      h *= 1099511628211ULL;
    }
    h ^= '|';
    h *= 1099511628211ULL;
  };
  mix(world);
  mix(config);
  mix(task);
  h ^= static_cast<uint64_t>(run_index);
  h *= 1099511628211ULL;
  return h;
}

namespace {

struct Claim {
  Vec2 position;
  bool valid = false;
};

// C5 localizes a 2D detection by dropping the bottom-center pixel ray
// onto the floor plane.
Vec2 project_detection_to_ground(const sim::Detection2D& det, const Transform& cam_to_map,
                                 const CameraIntrinsics& intr) {
  const double u = (det.box.u_min + det.box.u_max) / 2.0;
  const double v = det.box.v_max;
  const Vec3 dir_cam = Vec3{(u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0}.normalized();
  const Vec3 dir = cam_to_map.rotate(dir_cam);
  const Vec3 origin = cam_to_map.translation;
  if (dir.z < -0.02) {
    const double s = -origin.z / dir.z;
    if (s > 0 && s < 20.0) {
      const Vec3 hit = origin + dir * s;
      return {hit.x, hit.y};
    }
  }
  const Vec3 far = origin + dir * 6.0;
  return {far.x, far.y};
}

}  // namespace

TaskResult run_task(const BenchSetup& setup, const std::string& task, const AblationConfig& config,
                    uint64_t seed, const kb::KnowledgeBase& mapped_store,
                    const std::map<std::string, interp::Heatmap>& heatmaps) {
  TaskResult result;
  result.world = setup.world.name;
  result.config = config.id;
  result.task = task;

  sim::WorldSpec world = setup.world;
  world.seed = seed;
  sim::Simulator sim(world, setup.sim_config);

  const bool uses_store = config.knowledge_base != AblationConfig::KbMode::off;
  kb::KnowledgeBase store;
  if (uses_store) store = mapped_store;  // per-run copy
  int max_node = -1;
  double max_t = 0.0;
  for (const auto& [id, pose] : store.node_poses()) max_node = std::max(max_node, id);
  for (const auto& doc : store.documents()) max_t = std::max(max_t, doc.last_update);
  sim.set_node_start(max_node + 1);
  sim.set_clock(max_t + 1.0);
  sim.spawn_agents();

  Perception percep(config, setup.pipeline, uses_store ? &store : nullptr);
  percep.load_learned_features();

  const Costmap costmap =
      build_costmap(setup.world, setup.costmap_resolution, setup.robot_radius);

  const auto keypoint = [&](const std::string& name, const Vec2& fallback) {
    const auto it = setup.world.keypoints.find(name);
    return it != setup.world.keypoints.end() ? it->second : fallback;
  };
  const Vec2 idle = keypoint("idle", {0, 0});
  const Vec2 bottle_spot = keypoint("bottle", idle);

  const std::string target_class = task == "T1" ? "person" : (task == "T2" ? "bottle" : "");

  // Start pose: searches leave from idle, the transport leg from the
  // bottle position.
  sim.teleport(task == "T4" ? Pose2{bottle_spot.x, bottle_spot.y, 0} : Pose2{idle.x, idle.y, 0});

  // Traversal map. Searching with heatmaps biases travel through
  // previously crowded cells (inverted overlay, hot = cheap); the
  // transport leg avoids people (direct overlay).
  Costmap traversal = costmap;
  const interp::Heatmap* target_heat = nullptr;
  if (config.heatmaps) {
    const auto it = heatmaps.find(task == "T4" ? "person" : target_class);
    if (it != heatmaps.end()) {
      target_heat = &it->second;
      if (task == "T4") {
        traversal = interp::overlay_costmap(it->second, costmap, setup.avoid_heat_weight);
      } else {
        traversal =
            interp::overlay_costmap(interp::invert(it->second), costmap, setup.search_heat_weight);
      }
    }
  }

  const double t0 = sim.time();
  const auto finish = [&](bool success, const std::string& reason) {
    result.success = success;
    result.reason = reason;
    result.seconds = sim.time() - t0;
    if (result.seconds > setup.task_timeout) result.success = false;
    return result;
  };

  // Search goal generation.
  std::vector<Vec2> search_goals;
  if (task != "T4") {
    if (target_heat != nullptr) {
      // Hottest reachable cells first: a free cell scores the peak heat
      // in its neighborhood, so heat sitting on furniture still draws
      // the robot to the closest approachable spot.
      const auto& g = target_heat->grid.geom;
      const int reach = std::max(1, static_cast<int>(std::ceil(0.6 / g.resolution)));
      std::vector<std::pair<double, int>> ranked;
      for (int i = 0; i < g.size(); ++i) {
        if (costmap.cells[i] >= kLethalCost) continue;
        const int ix = i % g.width, iy = i / g.width;
        double score = 0.0;
        for (int dy = -reach; dy <= reach; ++dy) {
          for (int dx = -reach; dx <= reach; ++dx) {
            if (!g.contains(ix + dx, iy + dy)) continue;
            score = std::max(score, target_heat->grid.cells[(iy + dy) * g.width + ix + dx]);
          }
        }
        if (score > 0.05) ranked.push_back({score, i});
      }
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      for (const auto& [v, i] : ranked) {
        const Vec2 p{g.center_x(i % g.width), g.center_y(i / g.width)};
        bool close = false;
        for (const auto& q : search_goals) close = close || (q - p).norm() < 1.5;
        if (!close) search_goals.push_back(p);
        if (search_goals.size() >= 12) break;
      }
    }
    // Coverage fallback (and the C3-and-below strategy).
    const auto sweep = coverage_waypoints(costmap, setup.coverage_lane_spacing);
    search_goals.insert(search_goals.end(), sweep.begin(), sweep.end());
  } else {
    search_goals.push_back(idle);
    const auto path = plan_path(traversal, bottle_spot, idle);
    if (path) result.planned_path = path->waypoints;
  }

  PathFollower follower{search_goals, 0};
  int consecutive_detections = 0;
  double last_replan = sim.time();
  bool scan_pending = false;
  const CameraIntrinsics intr = setup.sim_config.camera.intrinsics();

  while (sim.time() - t0 < setup.task_timeout) {
    if (sim.path_done() && !sim.spinning()) {
      if (scan_pending && task != "T4") {
        // Arrived at a search goal: look around before moving on.
        sim.set_spin(2.0 * M_PI);
        scan_pending = false;
      } else {
        for (int tries = 0; tries < 8; ++tries) {
          if (follower.exhausted()) {
            if (task == "T4") {
              follower = PathFollower{{idle}, 0};  // re-seek the goal
            } else {
              follower.next = 0;  // keep searching until the timeout
            }
          }
          if (drive_to(sim, traversal, *follower.pop(), setup.task_speed)) {
            scan_pending = true;
            break;
          }
        }
      }
    }

    sim.step(setup.frame_dt);
    const auto frame = sim.render_frame();
    const Transform robot_pose = robot_pose_from_frame(frame, setup.sim_config.camera);
    if (uses_store) store.set_node_pose(frame.node_id, robot_pose);

    // Perception and found-claims.
    Claim claim;
    if (config.foreground_recognition) {
      percep.process_foreground(frame, setup.sim_config.camera);
      if (!target_class.empty()) {
        for (const auto& tr : percep.tracker().tracks()) {
          if (tr.class_label != target_class) continue;
          if (static_cast<int>(tr.trajectory.size()) < setup.found_min_track_updates) continue;
          if (sim.time() - tr.last_update > 1.0) continue;
          claim = {{tr.position.x, tr.position.y}, true};
          break;
        }
      }
    } else if (!target_class.empty()) {
      // Basic model: raw detections with a short persistence filter.
      const sim::Detection2D* hit = nullptr;
      for (const auto& det : frame.detections) {
        if (det.class_label == target_class) hit = &det;
      }
      if (hit != nullptr) {
        ++consecutive_detections;
        if (consecutive_detections >= setup.found_min_detection_frames)
          claim = {project_detection_to_ground(*hit, frame.camera_pose, intr), true};
      } else {
        consecutive_detections = 0;
      }
    }

    if (claim.valid) {
#ifdef HIPER_TASK_DEBUG
      std::fprintf(stderr, "claim at (%.2f, %.2f) t=%.1f robot=(%.2f,%.2f)\n", claim.position.x,
                   claim.position.y, sim.time(), sim.robot_pose().x, sim.robot_pose().y);
      for (const auto& tr : percep.tracker().tracks())
        std::fprintf(stderr, "  track %s class=%s pos=(%.2f,%.2f) traj=%zu\n",
                     tr.instance_uuid.c_str(), tr.class_label.c_str(), tr.position.x,
                     tr.position.y, tr.trajectory.size());
#endif
      bool matches_truth = false;
      if (task == "T1") {
        for (const auto& p : sim.agent_positions())
          matches_truth = matches_truth || (p - claim.position).norm() < setup.validation_radius;
      } else {
        for (const auto& o : setup.world.objects) {
          if (o.class_label != target_class) continue;
          matches_truth =
              matches_truth || (Vec2{o.position.x, o.position.y} - claim.position).norm() <
                                   setup.validation_radius;
        }
      }
      if (matches_truth) return finish(true, "");
      for (const auto& d : setup.world.decoys) {
        if ((Vec2{d.center.x, d.center.y} - claim.position).norm() < setup.validation_radius)
          ++result.decoy_false_positives;
      }
      return finish(false, "false_positive");
    }

    if (task == "T4") {
      const Vec2 pos{sim.robot_pose().x, sim.robot_pose().y};
      if ((pos - idle).norm() < setup.goal_tolerance) return finish(true, "");
      for (const auto& p : sim.agent_positions()) {
        if ((p - pos).norm() < setup.collision_distance) return finish(false, "collision");
      }
      // Replan around tracked people.
      if (config.foreground_recognition && sim.time() - last_replan > 1.0) {
        last_replan = sim.time();
        Costmap dynamic_map = traversal;
        for (const auto& tr : percep.tracker().tracks()) {
          if (tr.class_label != "person" || sim.time() - tr.last_update > 1.5) continue;
          const auto& g = dynamic_map.geom;
          const int cx = g.cell_x(tr.position.x), cy = g.cell_y(tr.position.y);
          const int r = static_cast<int>(std::ceil(0.5 / g.resolution));
          for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx)
              if (g.contains(cx + dx, cy + dy)) dynamic_map.at(cx + dx, cy + dy) = kLethalCost;
        }
        const auto path =
            plan_path(dynamic_map, {sim.robot_pose().x, sim.robot_pose().y}, idle);
        if (path) sim.set_path(path->waypoints);
      }
    }
  }
  return finish(false, "timeout");
}

CellStats ScenarioReport::cell(const std::string& config, const std::string& task) const {
  CellStats stats;
  std::vector<double> seconds;
  int success = 0;
  for (const auto& row : rows) {
    if (row.config != config || row.task != task) continue;
    seconds.push_back(row.seconds);
    success += row.success ? 1 : 0;
  }
  stats.runs = static_cast<int>(seconds.size());
  if (stats.runs == 0) return stats;
  double acc = 0.0;
  for (const double s : seconds) acc += s;
  stats.mean_seconds = acc / stats.runs;
  double var = 0.0;
  for (const double s : seconds) var += (s - stats.mean_seconds) * (s - stats.mean_seconds);
  stats.std_seconds = stats.runs > 1 ? std::sqrt(var / (stats.runs - 1)) : 0.0;
  stats.success_rate = static_cast<double>(success) / stats.runs;
  return stats;
}

double ScenarioReport::scenario_seconds(const std::string& config) const {
  std::set<std::string> tasks;
  for (const auto& row : rows)
    if (row.config == config) tasks.insert(row.task);
  double total = 0.0;
  for (const auto& t : tasks) total += cell(config, t).mean_seconds;
  return total;
}

std::string ScenarioReport::to_csv() const {
  std::ostringstream out;
  out << "world,config,task,run,seconds,success,reason\n";
  for (const auto& row : rows) {
    out << row.world << "," << row.config << "," << row.task << "," << row.run << ","
        << row.seconds << "," << (row.success ? 1 : 0) << "," << row.reason << "\n";
  }
  return out.str();
}

std::string ScenarioReport::format_table() const {
  std::set<std::string> configs, tasks;
  for (const auto& row : rows) {
    configs.insert(row.config);
    tasks.insert(row.task);
  }
  std::ostringstream out;
  out << "config  task  mean_s  std_s  success\n";
  for (const auto& c : configs) {
    for (const auto& t : tasks) {
      const CellStats s = cell(c, t);
      if (s.runs == 0) continue;
      char line[128];
      std::snprintf(line, sizeof(line), "%-7s %-5s %7.1f %6.1f %7.0f%%\n", c.c_str(), t.c_str(),
                    s.mean_seconds, s.std_seconds, 100.0 * s.success_rate);
      out << line;
    }
    char total[96];
    std::snprintf(total, sizeof(total), "%-7s scenario time %7.1f s\n", c.c_str(),
                  scenario_seconds(c));
    out << total;
  }
  return out.str();
}

ScenarioReport run_ablation(const BenchSetup& setup, const std::vector<std::string>& config_ids,
                            const std::vector<std::string>& tasks, int n,
                            double longterm_minutes) {
  if (n < 1) throw std::invalid_argument("run_ablation: n must be >= 1");
  ScenarioReport report;

  kb::KnowledgeBase mapped;
  Costmap costmap;
  initial_mapping(setup, mapped, &costmap);

  for (const auto& config_id : config_ids) {
    const AblationConfig config = AblationConfig::by_id(config_id);
    kb::KnowledgeBase store = mapped;
    std::map<std::string, interp::Heatmap> heatmaps;
    if (config.heatmaps || config.feature_learning) {
      run_longterm(setup, config, longterm_minutes, store);
      if (config.heatmaps) {
        double max_t = 0.0;
        for (const auto& doc : store.documents()) max_t = std::max(max_t, doc.last_update);
        heatmaps =
            generate_class_heatmaps(store, costmap.geom, 0.0, max_t + 1.0, setup.pipeline.heatmap);
      }
    }
    for (const auto& task : tasks) {
      for (int run = 0; run < n; ++run) {
        TaskResult row = run_task(setup, task, config,
                                  run_seed(setup.world.name, config_id, task, run), store, heatmaps);
        row.run = run;
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

}  // namespace hiper::bench
