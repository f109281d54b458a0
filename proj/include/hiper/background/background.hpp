#pragma once

#include <span>
#include <string>
#include <vector>

#include "hiper/core/errors.hpp"
#include "hiper/core/config.hpp"
#include "hiper/entities.hpp"
#include "hiper/kb/knowledge_base.hpp"

namespace hiper::background {

struct BackgroundParams {
  double downsample_leaf = 0.05;

  double ransac_dist_thresh = 0.02;
  int ransac_min_inliers = 120;
  int ransac_max_planes = 12;
  int ransac_iterations = 120;
  uint64_t ransac_seed = 7;

  // Plane classification. "Vertical normal" planes are horizontal
  // structure (floor/ceiling/table); near-horizontal normals are walls.
  double vertical_normal_min_dot = 0.9848;  // cos 10 deg
  double wall_normal_max_dot = 0.17365;     // cos 80 deg
  double floor_max_height = 0.05;
  double ceiling_min_height = 2.0;
  double table_min_height = 0.4;
  double table_max_height = 1.2;

  // Merge criteria cascade.
  double align_max_angle_dot = 0.9848;  // cos 10 deg
  double align_max_offset = 0.05;
  double bbox_margin = 0.05;
  double contour_overlap_min = 0.2;

  static BackgroundParams from_config(const Config& cfg);
};

struct PlaneFit {
  Plane plane;
  std::vector<int> inliers;  // indices into the input cloud
  double mean_height = 0.0;
};

// <= one centroid per voxel of side leaf; leaf <= 0 throws.
std::vector<Vec3> downsample(std::span<const Vec3> points, double leaf);

// Iterative seeded RANSAC with least-squares refits; too few points
// yields an empty list.
std::vector<PlaneFit> extract_planes(std::span<const Vec3> points, const BackgroundParams& params,
                                     uint64_t seed_salt = 0);

std::string classify_plane(const Plane& plane, double mean_height, const BackgroundParams& params);

// Full per-frame extraction: downsample, transform to the robot frame,
// fit planes, classify, drop unknowns, upload observations.
std::vector<BackgroundObservation> extract_background_observations(
    std::span<const Vec3> camera_points, const Transform& camera_in_robot, int node_id, double t,
    const BackgroundParams& params, kb::KnowledgeBase& store);

enum class MergeOutcome { kNew, kMerged, kMergedDedup };

// Merges one observation (already uploaded) into the background
// instances of the store, criteria cascade class -> alignment -> bbox ->
// contour overlap. The observation's node pose must be mirrored in the
// store or a NotFoundError is thrown.
MergeOutcome merge_background_observation(const BackgroundObservation& obs,
                                          const BackgroundParams& params,
                                          kb::KnowledgeBase& store);

// Injected floor/ceiling instances spanning the map bounds, flagged
// synthetic, anchored to the given node.
void inject_synthetic_planes(const Aabb& map_bounds, int node_id, double t,
                             const BackgroundParams& params, kb::KnowledgeBase& store);

}  // namespace hiper::background
