#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hiper/core/geometry.hpp"
#include "hiper/core/polygon.hpp"

// Scene entities shared between recognition, the knowledge base, and
// interpretation. Observations live in the frame of their pose-graph
// node; instances live in the map frame.

namespace hiper {

struct BackgroundObservation {
  std::string uuid;
  std::string class_label;  // wall | floor | ceiling | table | unknown
  Plane plane;              // node (robot) frame
  Polygon2 contour;         // plane coordinates via plane.basis()
  OrientedBox bbox;         // node frame
  int node_id = 0;
  double t = 0.0;
  bool synthetic = false;  // injected floor/ceiling rather than extracted

  double contour_area() const { return polygon_area(contour); }
  std::vector<Vec3> contour_points_3d() const;
};

struct BackgroundInstance {
  std::string uuid;
  std::string class_label;
  Plane plane;       // map frame, area-weighted over children
  Polygon2 contour;  // plane coordinates via plane.basis()
  OrientedBox bbox;  // map frame
  std::vector<std::string> child_uuids;
  double last_update = 0.0;
  bool synthetic = false;

  double contour_area() const { return polygon_area(contour); }
  std::vector<Vec3> contour_points_3d() const;
};

// Recomputes instance geometry (plane, contour, bbox) from its children
// in order. Used both on merge and when re-anchoring after pose-graph
// optimization, so both paths agree bit-for-bit.
void remerge_background_instance(BackgroundInstance& instance,
                                 const std::vector<const BackgroundObservation*>& children,
                                 const std::map<int, Transform>& node_poses);

// Oriented box spanning a contour that lies on a plane.
OrientedBox plane_contour_box(const Plane& plane, const Polygon2& contour, double thickness);

struct ForegroundBlob {
  std::vector<Vec3> points;  // robot frame
  Vec3 centroid;             // robot frame
  Aabb bbox3d;               // robot frame
  PixelRect image_region;
};

struct ForegroundObservation {
  std::string uuid;
  std::string class_label = "unknown";
  ForegroundBlob blob;
  int node_id = 0;
  double t = 0.0;
  std::optional<double> detection_score;
};

struct TrajectoryPoint {
  double t = 0.0;
  Vec3 position;  // map frame
  int node_id = 0;
  Vec3 local;  // node frame, kept for re-anchoring
  double speed = 0.0;  // filter speed estimate at this update
};

// Foreground instance as stored in the knowledge base: a finished or
// live track snapshot.
struct TrackInstance {
  std::string uuid;
  std::string class_label;
  Vec3 position;  // map frame
  Vec3 velocity;
  Aabb bbox;  // map frame
  std::vector<TrajectoryPoint> trajectory;
  std::vector<std::string> child_uuids;
  double last_update = 0.0;
  bool frozen = false;
};

void reanchor_track_instance(TrackInstance& instance, const std::map<int, Transform>& node_poses,
                             int node_from, int node_to);

// Object Dynamic Score and friends (per-class learned features).
struct DynamicStats {
  std::string class_label;
  double sigma = 0.0;       // stationary noise scale, m/s
  double mean_speed = 0.0;  // mean of the dynamic portion
  double ci_low = 0.0;
  double ci_high = 0.0;
  double ratio = 0.0;  // dynamic-to-static sample ratio
  size_t sample_count = 0;
};

struct SizeStats {
  std::string class_label;
  double ci_low = 0.0;  // m^3
  double ci_high = 0.0;
  size_t sample_count = 0;
};

struct AltitudeStats {
  std::string class_label;
  double ci_low = 0.0;  // meters above floor
  double ci_high = 0.0;
  size_t sample_count = 0;
};

struct HeatmapInfo {
  std::string class_label;
  double t_from = 0.0;
  double t_to = 0.0;
  bool inverted = false;
  std::string grid_path;  // portable graymap on disk
};

struct MapInfo {
  std::string costmap_ref;
  std::string cloud_ref;
};

struct EnvironmentInfo {
  std::string environment_id;
  std::string costmap_ref;
  std::vector<std::array<double, 3>> robot_trajectory;  // t, x, y
};

}  // namespace hiper
