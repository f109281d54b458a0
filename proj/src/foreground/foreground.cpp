#include "hiper/foreground/foreground.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "hiper/core/errors.hpp"
#include "hiper/core/kernels.hpp"

namespace hiper::foreground {

ForegroundParams ForegroundParams::from_config(const Config& cfg) {
  ForegroundParams p;
  const std::string s = "foreground";
  p.downsample_leaf = cfg.get_double(s, "downsample_leaf", p.downsample_leaf);
  p.bbox_margin = cfg.get_double(s, "bbox_margin", p.bbox_margin);
  p.cluster_tolerance = cfg.get_double(s, "cluster_tolerance", p.cluster_tolerance);
  p.cluster_min_size = cfg.get_int(s, "cluster_min_size", p.cluster_min_size);
  p.cluster_max_size = cfg.get_int(s, "cluster_max_size", p.cluster_max_size);
  p.iou_threshold = cfg.get_double(s, "iou_threshold", p.iou_threshold);
  p.sync_window = cfg.get_double(s, "sync_window", p.sync_window);
  return p;
}

std::vector<Vec3> filter_background(std::span<const Vec3> points,
                                    std::span<const OrientedBox> bg_boxes, double margin) {
  std::vector<uint8_t> mask;
  kernels::inside_box_mask(points, bg_boxes, margin, mask);
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    if (!mask[i]) out.push_back(points[i]);
  }
  return out;
}

std::vector<ForegroundBlob> cluster(std::span<const Vec3> points, double tolerance, int min_size,
                                    int max_size) {
  if (tolerance <= 0.0) throw std::invalid_argument("cluster: tolerance must be > 0");
  std::vector<ForegroundBlob> blobs;
  if (points.empty()) return blobs;

  const auto neighbors = kernels::radius_neighbors(points, tolerance);
  std::vector<int32_t> component(points.size(), -1);
  int32_t next_component = 0;
  std::deque<int32_t> queue;
  for (size_t seed = 0; seed < points.size(); ++seed) {
    if (component[seed] >= 0) continue;
    const int32_t id = next_component++;
    component[seed] = id;
    queue.push_back(static_cast<int32_t>(seed));
    while (!queue.empty()) {
      const int32_t i = queue.front();
      queue.pop_front();
      for (const int32_t j : neighbors[i]) {
        if (component[j] < 0) {
          component[j] = id;
          queue.push_back(j);
        }
      }
    }
  }

  std::vector<std::vector<int32_t>> members(next_component);
  for (size_t i = 0; i < points.size(); ++i)
    members[component[i]].push_back(static_cast<int32_t>(i));

  for (const auto& m : members) {
    if (static_cast<int>(m.size()) < min_size || static_cast<int>(m.size()) > max_size) continue;
    ForegroundBlob blob;
    blob.points.reserve(m.size());
    Vec3 acc;
    for (const int32_t i : m) {
      blob.points.push_back(points[i]);
      blob.bbox3d.expand(points[i]);
      acc += points[i];
    }
    blob.centroid = acc * (1.0 / m.size());
    blobs.push_back(std::move(blob));
  }
  return blobs;
}

double compute_iou(const PixelRect& a, const PixelRect& b) { return rect_iou(a, b); }

std::vector<ForegroundObservation> assign_semantics(
    std::vector<ForegroundBlob> blobs, std::span<const sim::Detection2D> detections,
    double blob_time, double detection_time, const Transform& robot_in_camera,
    const CameraIntrinsics& intrinsics, int node_id, const ForegroundParams& params,
    kb::KnowledgeBase* store) {
  if (std::abs(blob_time - detection_time) > params.sync_window)
    throw StaleDataError("assign_semantics: blobs and detections are not synchronized");

  for (auto& blob : blobs) {
    PixelRect r{1e30, 1e30, -1e30, -1e30};
    int projected = 0;
    for (const auto& p : blob.points) {
      const auto px = intrinsics.project(robot_in_camera.apply(p));
      if (!px) continue;
      ++projected;
      r.u_min = std::min(r.u_min, px->x);
      r.v_min = std::min(r.v_min, px->y);
      r.u_max = std::max(r.u_max, px->x);
      r.v_max = std::max(r.v_max, px->y);
    }
    blob.image_region = projected > 0 ? r : PixelRect{};
  }

  std::vector<ForegroundObservation> out;
  out.reserve(blobs.size());
  for (auto& blob : blobs) {
    ForegroundObservation obs;
    obs.class_label = "unknown";
    obs.node_id = node_id;
    obs.t = blob_time;

    double best_iou = params.iou_threshold;
    for (const auto& det : detections) {
      const double iou = compute_iou(blob.image_region, det.box);
      if (iou > best_iou) {
        best_iou = iou;
        obs.class_label = det.class_label;
        obs.detection_score = det.score;
      }
    }
    obs.blob = std::move(blob);

    if (store != nullptr) upload_observation(obs, *store);
    out.push_back(std::move(obs));
  }
  return out;
}

void upload_observation(ForegroundObservation& obs, kb::KnowledgeBase& store) {
  obs.uuid = store.next_uuid("fo");
  kb::Document doc;
  doc.uuid = obs.uuid;
  doc.layer = kb::Layer::foreground;
  doc.kind = kb::Kind::observation;
  doc.frame = "node:" + std::to_string(obs.node_id);
  doc.last_update = obs.t;
  doc.class_label = obs.class_label;
  doc.bbox = obs.blob.bbox3d;
  // Documents carry a decimated copy of the blob; the full cloud only
  // lives on the frame path.
  ForegroundObservation stored = obs;
  constexpr size_t kMaxStoredPoints = 32;
  if (stored.blob.points.size() > kMaxStoredPoints) {
    std::vector<Vec3> thin;
    const size_t stride = stored.blob.points.size() / kMaxStoredPoints + 1;
    for (size_t i = 0; i < stored.blob.points.size(); i += stride)
      thin.push_back(stored.blob.points[i]);
    stored.blob.points = std::move(thin);
  }
  doc.payload = std::move(stored);
  store.upsert(std::move(doc));
}

}  // namespace hiper::foreground
