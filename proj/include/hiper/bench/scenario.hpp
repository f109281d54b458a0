#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hiper/bench/pipeline.hpp"
#include "hiper/bench/planner.hpp"
#include "hiper/interp/heatmap.hpp"
#include "hiper/kb/knowledge_base.hpp"
#include "hiper/sim/simulator.hpp"

namespace hiper::bench {

struct BenchSetup {
  sim::WorldSpec world;
  sim::SimConfig sim_config;
  PipelineParams pipeline;
  double costmap_resolution = 0.1;
  double robot_radius = 0.3;
  double frame_dt = 0.1;  // 10 Hz camera
  double mapping_speed = 0.6;
  double task_speed = 0.8;
  double task_timeout = 600.0;
  double coverage_lane_spacing = 1.5;
  double search_heat_weight = 60.0;    // inverted-heat traversal prior
  double avoid_heat_weight = 400.0;    // people overlay during transport
  double validation_radius = 1.2;      // claimed find vs ground truth
  double goal_tolerance = 0.35;
  double collision_distance = 0.55;
  int found_min_track_updates = 2;
  int found_min_detection_frames = 3;  // C5 persistence

  static BenchSetup for_world(const sim::WorldSpec& world, const Config& cfg = Config{});
};

struct MappingResult {
  int frames = 0;
  double sim_seconds = 0.0;
  double wall_seconds = 0.0;
  double precision_static = 1.0;  // vs ground truth
  size_t observations = 0;
  size_t instances = 0;
};

// Coverage sweep with the background pipeline at 2 Hz and no dynamics;
// fills the store with background instances, synthetic floor/ceiling,
// environment meta and the spatial-map document.
MappingResult initial_mapping(const BenchSetup& setup, kb::KnowledgeBase& store,
                              Costmap* costmap_out = nullptr);

struct LongtermResult {
  double sim_seconds = 0.0;
  int frames = 0;
  std::vector<std::string> fitted_classes;
  std::vector<std::string> heatmap_classes;
};

// Patrol with dynamics enabled; learns features (C1) and leaves the
// store ready for heatmap generation (C1/C2).
LongtermResult run_longterm(const BenchSetup& setup, const AblationConfig& config, double minutes,
                            kb::KnowledgeBase& store);

struct TaskResult {
  std::string world;
  std::string config;
  std::string task;  // T1 | T2 | T4
  int run = 0;
  double seconds = 0.0;
  bool success = false;
  std::string reason;  // empty on success
  int decoy_false_positives = 0;
  std::vector<Vec2> planned_path;  // initial transport plan (T4)
};

// One seeded task execution against a copy of the mapped store.
// Heatmaps (when the config uses them) come from the long-term phase.
TaskResult run_task(const BenchSetup& setup, const std::string& task, const AblationConfig& config,
                    uint64_t seed, const kb::KnowledgeBase& mapped_store,
                    const std::map<std::string, interp::Heatmap>& heatmaps);

struct CellStats {
  double mean_seconds = 0.0;
  double std_seconds = 0.0;
  double success_rate = 0.0;
  int runs = 0;
};

struct ScenarioReport {
  std::vector<TaskResult> rows;

  CellStats cell(const std::string& config, const std::string& task) const;
  double scenario_seconds(const std::string& config) const;
  std::string to_csv() const;
  std::string format_table() const;
};

// Deterministic per-cell seed.
uint64_t run_seed(const std::string& world, const std::string& config, const std::string& task,
                  int run_index);

// One non-inverted heatmap per tracked class seen in the store.
std::map<std::string, interp::Heatmap> generate_class_heatmaps(const kb::KnowledgeBase& store,
                                                               const GridGeometry& geom,
                                                               double t_from, double t_to,
                                                               const interp::HeatmapParams& params);

// Full harness: mapping, per-config long-term when needed, then n runs
// per (config, task) cell.
ScenarioReport run_ablation(const BenchSetup& setup, const std::vector<std::string>& config_ids,
                            const std::vector<std::string>& tasks, int n,
                            double longterm_minutes);

}  // namespace hiper::bench
