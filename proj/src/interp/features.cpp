#include "hiper/interp/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hiper/core/rng.hpp"

namespace hiper::interp {

FeatureParams FeatureParams::from_config(const Config& cfg) {
  FeatureParams p;
  const std::string s = "interpretation";
  p.min_samples = static_cast<size_t>(cfg.get_int(s, "min_samples", static_cast<int>(p.min_samples)));
  p.bootstrap_resamples = cfg.get_int(s, "bootstrap_resamples", p.bootstrap_resamples);
  p.filter_slack = cfg.get_double(s, "filter_slack", p.filter_slack);
  p.filter_slack_min = cfg.get_double(s, "filter_slack_min", p.filter_slack_min);
  p.speed_source = cfg.get_string(s, "speed_source", p.speed_source);
  return p;
}

std::vector<double> trajectory_speeds(const std::vector<TrajectoryPoint>& trajectory) {
  std::vector<double> speeds;
  for (size_t i = 1; i < trajectory.size(); ++i) {
    const double dt = trajectory[i].t - trajectory[i - 1].t;
    if (dt <= 1e-9) continue;
    speeds.push_back((trajectory[i].position - trajectory[i - 1].position).norm() / dt);
  }
  return speeds;
}

namespace {

double percentile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * (sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(sorted.size() - 1, lo + 1);
  const double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// E[|X| given |X| <= 2 sigma] = sigma * sqrt(2/pi) (1 - e^-2) / erf(sqrt 2).
const double kTrimmedMeanFactor =
    std::sqrt(2.0 / M_PI) * (1.0 - std::exp(-2.0)) / std::erf(std::sqrt(2.0));

}  // namespace

std::optional<DynamicStats> fit_dynamics(std::span<const double> speeds,
                                         const FeatureParams& params) {
  if (speeds.size() < params.min_samples) return std::nullopt;

  // Seed the trim inside the lowest speed mode; the iteration then
  // climbs monotonically to the smallest fixed point, which is the
  // stationary noise scale even when a dynamic mode dominates.
  std::vector<double> sorted(speeds.begin(), speeds.end());
  std::sort(sorted.begin(), sorted.end());
  double sigma = std::max(1e-6, percentile(sorted, 0.05));

  // Trim at 2 sigma-hat until the estimate stops moving.
  for (int it = 0; it < 30; ++it) {
    const double cut = 2.0 * sigma;
    double acc = 0.0;
    size_t count = 0;
    for (const double s : speeds) {
      if (s <= cut) {
        acc += s;
        ++count;
      }
    }
    if (count == 0 || acc <= 0.0) {
      sigma *= 2.0;  // exact-zero samples only; widen until real mass appears
      continue;
    }
    const double next = (acc / count) / kTrimmedMeanFactor;
    if (std::abs(next - sigma) < 1e-9 * std::max(1.0, sigma)) {
      sigma = next;
      break;
    }
    sigma = next;
  }

  DynamicStats stats;
  stats.sigma = sigma;
  stats.sample_count = speeds.size();
  std::vector<double> dynamic;
  for (const double s : speeds) {
    if (s > 2.0 * sigma) dynamic.push_back(s);
  }
  stats.ratio = static_cast<double>(dynamic.size()) / speeds.size();
  if (!dynamic.empty()) {
    double acc = 0.0;
    for (const double s : dynamic) acc += s;
    stats.mean_speed = acc / dynamic.size();
    std::sort(dynamic.begin(), dynamic.end());
    stats.ci_low = percentile(dynamic, 0.025);
    stats.ci_high = percentile(dynamic, 0.975);
  }
  return stats;
}

namespace {

std::optional<std::pair<double, double>> bootstrap_support(std::span<const double> samples,
                                                           const FeatureParams& params) {
  if (samples.size() < params.min_samples) return std::nullopt;
  Rng rng(params.bootstrap_seed);
  std::vector<double> mins, maxs;
  mins.reserve(params.bootstrap_resamples);
  maxs.reserve(params.bootstrap_resamples);
  const int n = static_cast<int>(samples.size());
  for (int b = 0; b < params.bootstrap_resamples; ++b) {
    double lo = samples[rng.uniform_int(0, n - 1)];
    double hi = lo;
    for (int k = 1; k < n; ++k) {
      const double s = samples[rng.uniform_int(0, n - 1)];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    mins.push_back(lo);
    maxs.push_back(hi);
  }
  std::sort(mins.begin(), mins.end());
  std::sort(maxs.begin(), maxs.end());
  return std::make_pair(percentile(mins, 0.025), percentile(maxs, 0.975));
}

}  // namespace

std::optional<SizeStats> fit_size(std::span<const double> volumes, const FeatureParams& params) {
  const auto support = bootstrap_support(volumes, params);
  if (!support) return std::nullopt;
  SizeStats s;
  s.ci_low = support->first;
  s.ci_high = support->second;
  s.sample_count = volumes.size();
  return s;
}

std::optional<AltitudeStats> fit_altitude(std::span<const double> altitudes,
                                          const FeatureParams& params) {
  const auto support = bootstrap_support(altitudes, params);
  if (!support) return std::nullopt;
  AltitudeStats s;
  s.ci_low = support->first;
  s.ci_high = support->second;
  s.sample_count = altitudes.size();
  return s;
}

bool apply_feature_filter(double volume, double altitude, const SizeStats* size,
                          const AltitudeStats* alt, const FeatureParams& params) {
  if (size != nullptr) {
    const double margin =
        std::max(params.filter_slack_min * 0.01, params.filter_slack * (size->ci_high - size->ci_low));
    if (volume < size->ci_low - margin || volume > size->ci_high + margin) return false;
  }
  if (alt != nullptr) {
    const double margin = std::max(params.filter_slack_min,
                                   params.filter_slack * (alt->ci_high - alt->ci_low));
    if (altitude < alt->ci_low - margin || altitude > alt->ci_high + margin) return false;
  }
  return true;
}

std::vector<std::string> learn_features(kb::KnowledgeBase& store, double now,
                                        const FeatureParams& params) {
  struct ClassSamples {
    std::vector<double> speeds;
    std::vector<double> volumes;
    std::vector<double> altitudes;
  };
  std::map<std::string, ClassSamples> by_class;
  const auto& poses = store.node_poses();
  for (const auto& doc : store.documents()) {
    if (doc.class_label == "unknown") continue;
    if (const auto* track = std::get_if<TrackInstance>(&doc.payload)) {
      auto& bucket = by_class[doc.class_label];
      if (params.speed_source == "finite_difference") {
        const auto speeds = trajectory_speeds(track->trajectory);
        bucket.speeds.insert(bucket.speeds.end(), speeds.begin(), speeds.end());
      } else {
        for (size_t i = 1; i < track->trajectory.size(); ++i)
          bucket.speeds.push_back(track->trajectory[i].speed);
      }
    } else if (const auto* obs = std::get_if<ForegroundObservation>(&doc.payload)) {
      // One size/altitude sample per observation, measured on the
      // map-frame bounds of the (stored) blob points.
      const auto it = poses.find(obs->node_id);
      if (it == poses.end() || obs->blob.points.empty()) continue;
      Aabb box;
      for (const auto& p : obs->blob.points) box.expand(it->second.apply(p));
      auto& bucket = by_class[doc.class_label];
      bucket.volumes.push_back(box.volume());
      bucket.altitudes.push_back(box_altitude(box));
    }
  }

  std::vector<std::string> fitted;
  for (const auto& [class_label, samples] : by_class) {
    bool any = false;
    if (const auto dyn = fit_dynamics(samples.speeds, params)) {
      DynamicStats stats = *dyn;
      stats.class_label = class_label;
      kb::Document doc;
      doc.uuid = "an-dyn-" + class_label;
      doc.layer = kb::Layer::foreground;
      doc.kind = kb::Kind::analysis;
      doc.frame = "map";
      doc.last_update = now;
      doc.class_label = class_label;
      doc.payload = stats;
      store.upsert(std::move(doc));
      any = true;
    }
    if (const auto size = fit_size(samples.volumes, params)) {
      SizeStats stats = *size;
      stats.class_label = class_label;
      kb::Document doc;
      doc.uuid = "an-size-" + class_label;
      doc.layer = kb::Layer::foreground;
      doc.kind = kb::Kind::analysis;
      doc.frame = "map";
      doc.last_update = now;
      doc.class_label = class_label;
      doc.payload = stats;
      store.upsert(std::move(doc));
      any = true;
    }
    if (const auto alt = fit_altitude(samples.altitudes, params)) {
      AltitudeStats stats = *alt;
      stats.class_label = class_label;
      kb::Document doc;
      doc.uuid = "an-alt-" + class_label;
      doc.layer = kb::Layer::foreground;
      doc.kind = kb::Kind::analysis;
      doc.frame = "map";
      doc.last_update = now;
      doc.class_label = class_label;
      doc.payload = stats;
      store.upsert(std::move(doc));
      any = true;
    }
    if (any) fitted.push_back(class_label);
  }
  return fitted;
}

}  // namespace hiper::interp
