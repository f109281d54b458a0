#pragma once

#include <limits>
#include <span>
#include <vector>

#include "hiper/core/errors.hpp"
#include "hiper/core/config.hpp"
#include "hiper/entities.hpp"
#include "hiper/kb/knowledge_base.hpp"
#include "hiper/sim/simulator.hpp"

namespace hiper::foreground {

struct ForegroundParams {
  double downsample_leaf = 0.02;
  double bbox_margin = 0.05;  // background box inflation when filtering
  double cluster_tolerance = 0.15;
  int cluster_min_size = 30;
  int cluster_max_size = std::numeric_limits<int>::max();
  double iou_threshold = 0.5;
  double sync_window = 0.05;  // seconds

  static ForegroundParams from_config(const Config& cfg);
};

// Preattentive split: drops every point inside an inflated background
// box. Output preserves input order and is a subset of the input.
std::vector<Vec3> filter_background(std::span<const Vec3> points,
                                    std::span<const OrientedBox> bg_boxes, double margin);

// Single-linkage Euclidean clustering; clusters outside the size band
// are dropped. tolerance <= 0 throws.
std::vector<ForegroundBlob> cluster(std::span<const Vec3> points, double tolerance, int min_size,
                                    int max_size);

double compute_iou(const PixelRect& a, const PixelRect& b);

// Projects blobs into the image plane and assigns each the class of its
// best-overlapping detection above the threshold; unmatched blobs stay
// "unknown". Detections without a blob yield no observation. Blobs and
// detections must be time-synchronized within sync_window.
std::vector<ForegroundObservation> assign_semantics(
    std::vector<ForegroundBlob> blobs, std::span<const sim::Detection2D> detections,
    double blob_time, double detection_time, const Transform& robot_in_camera,
    const CameraIntrinsics& intrinsics, int node_id, const ForegroundParams& params,
    kb::KnowledgeBase* store);

// Assigns a uuid and stores the observation document (blob decimated).
void upload_observation(ForegroundObservation& obs, kb::KnowledgeBase& store);

}  // namespace hiper::foreground
