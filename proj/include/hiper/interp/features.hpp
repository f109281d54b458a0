#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hiper/core/config.hpp"
#include "hiper/entities.hpp"
#include "hiper/kb/knowledge_base.hpp"

namespace hiper::interp {

struct FeatureParams {
  size_t min_samples = 30;
  int bootstrap_resamples = 1000;
  uint64_t bootstrap_seed = 11;
  double filter_slack = 0.25;      // CI width fraction added on each side
  double filter_slack_min = 0.05;  // absolute floor for the margin
  // Speed samples per update: "filter" takes the tracker's derived
  // velocity, "finite_difference" differentiates trajectory positions.
  std::string speed_source = "filter";

  static FeatureParams from_config(const Config& cfg);
};

// Absolute speeds from finite differences of a trajectory.
std::vector<double> trajectory_speeds(const std::vector<TrajectoryPoint>& trajectory);

// Splits speed samples into a stationary set modeled as a folded normal
// and a dynamic remainder. Sigma comes from truncated folded-normal
// moment matching iterated to a fixed point with the trim at 2 sigma.
// Fewer than min_samples yields nullopt (class keeps defaults).
std::optional<DynamicStats> fit_dynamics(std::span<const double> speeds,
                                         const FeatureParams& params);

// Percentile bootstrap of the resampled min/max support bounds.
std::optional<SizeStats> fit_size(std::span<const double> volumes, const FeatureParams& params);
std::optional<AltitudeStats> fit_altitude(std::span<const double> altitudes,
                                          const FeatureParams& params);

// Accept/reject an observation against learned size and altitude, each
// CI inflated by the slack margin. Rejected observations are expected
// to be relabeled "unknown" by the caller, not dropped.
bool apply_feature_filter(double volume, double altitude, const SizeStats* size,
                          const AltitudeStats* alt, const FeatureParams& params);

// Convenience: altitude of a map-frame box per the learned definition
// (center height minus half the vertical extent).
inline double box_altitude(const Aabb& bbox) { return bbox.center().z - bbox.size().z / 2.0; }

// Fits all three features for every class with enough samples in the
// store and publishes analysis documents. Returns fitted class names.
std::vector<std::string> learn_features(kb::KnowledgeBase& store, double now,
                                        const FeatureParams& params);

}  // namespace hiper::interp
