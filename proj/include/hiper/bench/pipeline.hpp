#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hiper/background/background.hpp"
#include "hiper/core/config.hpp"
#include "hiper/foreground/foreground.hpp"
#include "hiper/interp/features.hpp"
#include "hiper/interp/heatmap.hpp"
#include "hiper/kb/knowledge_base.hpp"
#include "hiper/sim/simulator.hpp"
#include "hiper/tracking/tracker.hpp"

namespace hiper::bench {

// Nested component subsets, C1 (full model) down to C5 (pose graph +
// raw 2D detections only).
struct AblationConfig {
  std::string id = "C1";
  bool foreground_recognition = true;
  bool background_recognition = true;
  enum class KbMode { off, mot_only, full } knowledge_base = KbMode::full;
  bool heatmaps = true;
  bool feature_learning = true;

  static AblationConfig by_id(const std::string& id);
  static std::vector<AblationConfig> all();

  // Feature flags as a bit set; used to check the nesting invariant.
  unsigned feature_bits() const;
};

struct PipelineParams {
  background::BackgroundParams background;
  foreground::ForegroundParams foreground;
  tracking::TrackingParams tracking;
  interp::FeatureParams features;
  interp::HeatmapParams heatmap;
  double background_period = 0.5;  // 2 Hz background worker

  static PipelineParams from_config(const Config& cfg);
};

struct FrameStats {
  size_t raw_points = 0;
  size_t filtered_points = 0;  // surviving the preattentive split
  double foreground_seconds = 0.0;
};

// Per-frame perception driver wired according to an ablation config.
class Perception {
 public:
  Perception(const AblationConfig& ablation, const PipelineParams& params,
             kb::KnowledgeBase* store);

  // Background pipeline pass (used at 2 Hz during mapping).
  std::vector<BackgroundObservation> process_background(const sim::SensorFrame& frame,
                                                        const sim::CameraConfig& camera);

  // Foreground pipeline pass (camera-rate path): preattentive filter,
  // clustering, semantic assignment, feature filter, MOT.
  std::vector<ForegroundObservation> process_foreground(const sim::SensorFrame& frame,
                                                        const sim::CameraConfig& camera,
                                                        FrameStats* stats = nullptr);

  // Pulls learned analyses from the store into the tracker gates and
  // the feature filter (active only with feature_learning enabled).
  void load_learned_features();

  tracking::Tracker& tracker() { return *tracker_; }
  const AblationConfig& ablation() const { return ablation_; }
  const PipelineParams& params() const { return params_; }
  kb::KnowledgeBase* store() { return store_; }

 private:
  AblationConfig ablation_;
  PipelineParams params_;
  kb::KnowledgeBase* store_;
  std::unique_ptr<tracking::Tracker> tracker_;
  std::map<std::string, SizeStats> size_stats_;
  std::map<std::string, AltitudeStats> altitude_stats_;
  double last_background_t_ = -1e9;
  mutable std::vector<OrientedBox> bg_box_cache_;  // map frame
  mutable bool bg_cache_valid_ = false;
};

}  // namespace hiper::bench
