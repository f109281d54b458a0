#include "hiper/bench/pipeline.hpp"

#include <chrono>
#include <stdexcept>

#include "hiper/core/kernels.hpp"

namespace hiper::bench {

AblationConfig AblationConfig::by_id(const std::string& id) {
  AblationConfig c;
  c.id = id;
  if (id == "C1") {
    // full model
  } else if (id == "C2") {
    c.feature_learning = false;
  } else if (id == "C3") {
    c.feature_learning = false;
    c.heatmaps = false;
    c.knowledge_base = KbMode::mot_only;
  } else if (id == "C4") {
    c.feature_learning = false;
    c.heatmaps = false;
    c.knowledge_base = KbMode::mot_only;
    c.background_recognition = false;
  } else if (id == "C5") {
    c.feature_learning = false;
    c.heatmaps = false;
    c.knowledge_base = KbMode::off;
    c.background_recognition = false;
    c.foreground_recognition = false;
  } else {
    throw std::invalid_argument("unknown ablation config: " + id);
  }
  return c;
}

std::vector<AblationConfig> AblationConfig::all() {
  return {by_id("C1"), by_id("C2"), by_id("C3"), by_id("C4"), by_id("C5")};
}

unsigned AblationConfig::feature_bits() const {
  unsigned bits = 1;  // basic model: pose graph + detector
  if (foreground_recognition) bits |= 1u << 1;
  if (background_recognition) bits |= 1u << 2;
  if (knowledge_base != KbMode::off) bits |= 1u << 3;
  if (knowledge_base == KbMode::full) bits |= 1u << 4;
  if (heatmaps) bits |= 1u << 5;
  if (feature_learning) bits |= 1u << 6;
  return bits;
}

PipelineParams PipelineParams::from_config(const Config& cfg) {
  PipelineParams p;
  p.background = background::BackgroundParams::from_config(cfg);
  p.foreground = foreground::ForegroundParams::from_config(cfg);
  p.tracking = tracking::TrackingParams::from_config(cfg);
  p.features = interp::FeatureParams::from_config(cfg);
  p.heatmap = interp::HeatmapParams::from_config(cfg);
  p.background_period = cfg.get_double("background", "period", p.background_period);
  return p;
}

Perception::Perception(const AblationConfig& ablation, const PipelineParams& params,
                       kb::KnowledgeBase* store)
    : ablation_(ablation), params_(params), store_(store) {
  if (ablation_.knowledge_base != AblationConfig::KbMode::off && store_ == nullptr)
    throw std::invalid_argument("this ablation config needs a knowledge base");
  tracker_ = std::make_unique<tracking::Tracker>(params_.tracking);
}

std::vector<BackgroundObservation> Perception::process_background(
    const sim::SensorFrame& frame, const sim::CameraConfig& camera) {
  if (!ablation_.background_recognition || store_ == nullptr) return {};
  if (frame.t - last_background_t_ < params_.background_period) return {};
  last_background_t_ = frame.t;

  const auto obs = background::extract_background_observations(
      frame.points, camera.mount(), frame.node_id, frame.t, params_.background, *store_);
  for (const auto& o : obs) background::merge_background_observation(o, params_.background, *store_);
  if (!obs.empty()) bg_cache_valid_ = false;
  return obs;
}

std::vector<ForegroundObservation> Perception::process_foreground(
    const sim::SensorFrame& frame, const sim::CameraConfig& camera, FrameStats* stats) {
  std::vector<ForegroundObservation> out;
  if (!ablation_.foreground_recognition) return out;

  const auto t0 = std::chrono::steady_clock::now();

  const auto ds = kernels::voxel_downsample(frame.points, params_.foreground.downsample_leaf);
  const auto robot_pts = kernels::transform_points(ds, camera.mount());

  // Background boxes into the robot frame for the preattentive split.
  std::vector<OrientedBox> bg_boxes;
  Transform node_pose = Transform::identity();
  if (store_ != nullptr) {
    const auto it = store_->node_poses().find(frame.node_id);
    if (it != store_->node_poses().end()) node_pose = it->second;
  } else {
    node_pose = frame.camera_pose.compose(camera.mount().inverse());
  }
  if (ablation_.background_recognition && store_ != nullptr) {
    if (!bg_cache_valid_) {
      bg_box_cache_.clear();
      for (const auto& doc : store_->documents()) {
        if (doc.layer != kb::Layer::background || doc.kind != kb::Kind::instance) continue;
        bg_box_cache_.push_back(std::get<BackgroundInstance>(doc.payload).bbox);
      }
      bg_cache_valid_ = true;
    }
    const Transform map_to_robot = node_pose.inverse();
    bg_boxes.reserve(bg_box_cache_.size());
    for (const auto& box : bg_box_cache_) bg_boxes.push_back(transformed(box, map_to_robot));
  }

  const auto filtered =
      foreground::filter_background(robot_pts, bg_boxes, params_.foreground.bbox_margin);
  auto blobs = foreground::cluster(filtered, params_.foreground.cluster_tolerance,
                                   params_.foreground.cluster_min_size,
                                   params_.foreground.cluster_max_size);
  out = foreground::assign_semantics(std::move(blobs), frame.detections, frame.t, frame.t,
                                     camera.mount().inverse(), camera.intrinsics(), frame.node_id,
                                     params_.foreground, nullptr);

  // Learned size/altitude gate: out-of-range observations lose their
  // class instead of being dropped.
  if (ablation_.feature_learning) {
    for (auto& obs : out) {
      if (obs.class_label == "unknown") continue;
      const auto size_it = size_stats_.find(obs.class_label);
      const auto alt_it = altitude_stats_.find(obs.class_label);
      if (size_it == size_stats_.end() && alt_it == altitude_stats_.end()) continue;
      Aabb map_box;
      for (const auto& p : obs.blob.points) map_box.expand(node_pose.apply(p));
      const bool ok = interp::apply_feature_filter(
          map_box.volume(), interp::box_altitude(map_box),
          size_it != size_stats_.end() ? &size_it->second : nullptr,
          alt_it != altitude_stats_.end() ? &alt_it->second : nullptr, params_.features);
      if (!ok) {
        obs.class_label = "unknown";
        obs.detection_score.reset();
      }
    }
  }

  if (store_ != nullptr) {
    for (auto& obs : out) foreground::upload_observation(obs, *store_);
    tracker_->process(out, frame.t, node_pose, *store_);
  }

  if (stats != nullptr) {
    stats->raw_points = robot_pts.size();
    stats->filtered_points = filtered.size();
    stats->foreground_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return out;
}

void Perception::load_learned_features() {
  if (!ablation_.feature_learning || store_ == nullptr) return;
  for (const auto& doc : store_->documents()) {
    if (doc.kind != kb::Kind::analysis) continue;
    if (const auto* dyn = std::get_if<DynamicStats>(&doc.payload)) {
      tracker_->set_class_dynamics(doc.class_label, {dyn->sigma, dyn->ci_high});
    } else if (const auto* size = std::get_if<SizeStats>(&doc.payload)) {
      size_stats_[doc.class_label] = *size;
    } else if (const auto* alt = std::get_if<AltitudeStats>(&doc.payload)) {
      altitude_stats_[doc.class_label] = *alt;
    }
  }
}

}  // namespace hiper::bench
