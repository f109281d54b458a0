#include "hiper/tracking/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hiper/core/errors.hpp"
#include "hiper/tracking/hungarian.hpp"

namespace hiper::tracking {

TrackingParams TrackingParams::from_config(const Config& cfg) {
  TrackingParams p;
  const std::string s = "tracking";
  p.process_noise_pos = cfg.get_double(s, "process_noise_pos", p.process_noise_pos);
  p.process_noise_vel = cfg.get_double(s, "process_noise_vel", p.process_noise_vel);
  p.measurement_noise = cfg.get_double(s, "measurement_noise", p.measurement_noise);
  p.init_velocity_var = cfg.get_double(s, "init_velocity_var", p.init_velocity_var);
  p.decay_tau = cfg.get_double(s, "decay_tau", p.decay_tau);
  p.freeze_ttl = cfg.get_double(s, "freeze_ttl", p.freeze_ttl);
  p.gate_dt_max = cfg.get_double(s, "gate_dt_max", p.gate_dt_max);
  p.base_gate = cfg.get_double(s, "base_gate", p.base_gate);
  p.publish_period = cfg.get_double(s, "publish_period", p.publish_period);
  return p;
}

namespace {

using Cov = std::array<double, 36>;

inline double& at(Cov& c, int i, int j) { return c[i * 6 + j]; }
inline double at(const Cov& c, int i, int j) { return c[i * 6 + j]; }

Cov initial_covariance(const TrackingParams& p) {
  Cov c{};
  for (int i = 0; i < 3; ++i) at(c, i, i) = p.measurement_noise;
  for (int i = 3; i < 6; ++i) at(c, i, i) = p.init_velocity_var;
  return c;
}

// P <- F P F^T + Q dt with F = [I dtI; 0 I].
void propagate_covariance(Cov& p, double dt, const TrackingParams& params) {
  // F P: rows 0..2 pick up dt * rows 3..5.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 6; ++j) at(p, i, j) += dt * at(p, i + 3, j);
  // (F P) F^T: cols 0..2 pick up dt * cols 3..5.
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j) at(p, i, j) += dt * at(p, i, j + 3);
  for (int i = 0; i < 3; ++i) at(p, i, i) += params.process_noise_pos * dt;
  for (int i = 3; i < 6; ++i) at(p, i, i) += params.process_noise_vel * dt;
}

bool cholesky_ok(const Cov& p) {
  double l[6][6] = {};
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = at(p, i, j);
      for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (s <= 0.0) return false;
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  return true;
}

bool invert3(const double m[3][3], double inv[3][3]) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (std::abs(det) < 1e-18) return false;
  const double id = 1.0 / det;
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * id;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * id;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * id;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * id;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * id;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * id;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * id;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * id;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * id;
  return true;
}

}  // namespace

void predict(Track& track, double dt, const TrackingParams& params) {
  if (dt <= 0.0) throw std::invalid_argument("predict: dt must be > 0");
  track.position = track.position + track.velocity * dt;
  if (!track.update_since_predict) {
    track.velocity = track.velocity * std::exp(-dt / params.decay_tau);
    if (track.velocity.norm() < params.velocity_floor) track.velocity = {0, 0, 0};
  }
  propagate_covariance(track.covariance, dt, params);
  track.update_since_predict = false;
  track.last_predict += dt;
}

void update(Track& track, const Vec3& z, double t, const TrackingParams& params,
            std::optional<double> class_sigma) {
  const double r = class_sigma ? std::max(1e-6, (*class_sigma) * (*class_sigma))
                               : params.measurement_noise;

  double s[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s[i][j] = at(track.covariance, i, j) + (i == j ? r : 0.0);
  double sinv[3][3];
  if (!invert3(s, sinv)) {
    track.covariance = initial_covariance(params);
    return;
  }

  // K = P H^T S^-1, H = [I 0].
  double k[6][3];
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int m = 0; m < 3; ++m) acc += at(track.covariance, i, m) * sinv[m][j];
      k[i][j] = acc;
    }

  const Vec3 innovation = z - track.position;
  const double y[3] = {innovation.x, innovation.y, innovation.z};
  double dx[6];
  for (int i = 0; i < 6; ++i) dx[i] = k[i][0] * y[0] + k[i][1] * y[1] + k[i][2] * y[2];
  track.position = track.position + Vec3{dx[0], dx[1], dx[2]};
  track.velocity = track.velocity + Vec3{dx[3], dx[4], dx[5]};

  // Joseph form: P = (I-KH) P (I-KH)^T + K R K^T.
  double ikh[6][6] = {};
  for (int i = 0; i < 6; ++i) ikh[i][i] = 1.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j) ikh[i][j] -= k[i][j];
  double tmp[6][6];
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double acc = 0.0;
      for (int m = 0; m < 6; ++m) acc += ikh[i][m] * at(track.covariance, m, j);
      tmp[i][j] = acc;
    }
  Cov next{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double acc = 0.0;
      for (int m = 0; m < 6; ++m) acc += tmp[i][m] * ikh[j][m];
      for (int m = 0; m < 3; ++m) acc += k[i][m] * r * k[j][m];
      at(next, i, j) = acc;
    }
  // Symmetrize against drift.
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) {
      const double v = 0.5 * (at(next, i, j) + at(next, j, i));
      at(next, i, j) = v;
      at(next, j, i) = v;
    }

  if (!cholesky_ok(next)) {
    track.covariance = initial_covariance(params);
  } else {
    track.covariance = next;
  }
  track.last_update = t;
  track.update_since_predict = true;
}

Association associate(const std::vector<Track>& tracks,
                      const std::vector<Vec3>& observation_centers,
                      const std::vector<std::string>& observation_classes, double dt,
                      const TrackingParams& params,
                      const std::map<std::string, ClassDynamics>& class_dynamics) {
  Association result;
  const int n = static_cast<int>(tracks.size());
  const int m = static_cast<int>(observation_centers.size());
  std::vector<double> cost(static_cast<size_t>(n) * m, kInfeasible);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (tracks[i].class_label != observation_classes[j]) continue;
      const double d = (tracks[i].position - observation_centers[j]).norm();
      if (params.base_gate > 0.0 && d > params.base_gate) continue;
      if (dt < params.gate_dt_max) {
        const auto it = class_dynamics.find(tracks[i].class_label);
        if (it != class_dynamics.end() && it->second.gate_cu > 0.0 &&
            d > it->second.gate_cu * dt)
          continue;
      }
      cost[static_cast<size_t>(i) * m + j] = d;
    }
  }
  const std::vector<int> row_to_col = solve_assignment(cost, n, m);
  std::vector<char> obs_used(m, 0);
  for (int i = 0; i < n; ++i) {
    if (row_to_col[i] >= 0) {
      result.matches.emplace_back(i, row_to_col[i]);
      obs_used[row_to_col[i]] = 1;
    } else {
      result.unmatched_tracks.push_back(i);
    }
  }
  for (int j = 0; j < m; ++j)
    if (!obs_used[j]) result.unmatched_observations.push_back(j);
  return result;
}

void Tracker::process(const std::vector<ForegroundObservation>& observations, double t,
                      const Transform& node_pose, kb::KnowledgeBase& store) {
  std::vector<Vec3> centers;
  std::vector<std::string> classes;
  centers.reserve(observations.size());
  for (const auto& obs : observations) {
    centers.push_back(node_pose.apply(obs.blob.centroid));
    classes.push_back(obs.class_label);
  }

  double dt = params_.gate_dt_max;  // without history, gating stays off
  if (!tracks_.empty()) {
    double last = 0.0;
    for (const auto& tr : tracks_) last = std::max(last, tr.last_predict);
    dt = std::max(1e-3, t - last);
    for (auto& tr : tracks_) predict(tr, std::max(1e-3, t - tr.last_predict), params_);
  }

  const Association assoc =
      associate(tracks_, centers, classes, dt, params_, class_dynamics_);

  const Transform map_to_node = node_pose.inverse();
  const auto apply_measurement = [&](Track& track, int obs_index) {
    const auto& obs = observations[obs_index];
    std::optional<double> sigma;
    const auto it = class_dynamics_.find(track.class_label);
    if (it != class_dynamics_.end() && it->second.sigma > 0.0) sigma = it->second.sigma;
    update(track, centers[obs_index], t, params_, sigma);
    track.child_uuids.push_back(obs.uuid);
    TrajectoryPoint tp;
    tp.t = t;
    tp.position = track.position;
    tp.node_id = obs.node_id;
    tp.local = map_to_node.apply(track.position);
    tp.speed = track.speed();
    if (track.trajectory.empty() || tp.t > track.trajectory.back().t)
      track.trajectory.push_back(tp);
    track.bbox = transform_aabb(obs.blob.bbox3d, node_pose);
  };

  for (const auto& [ti, oi] : assoc.matches) apply_measurement(tracks_[ti], oi);

  for (const int oi : assoc.unmatched_observations) {
    const auto& obs = observations[oi];
    Track track;
    track.instance_uuid = store.next_uuid("fi");
    track.class_label = obs.class_label;
    track.position = centers[oi];
    track.velocity = {0, 0, 0};  // zero-velocity init
    track.covariance = initial_covariance(params_);
    track.last_update = t;
    track.last_predict = t;
    track.update_since_predict = true;
    tracks_.push_back(std::move(track));
    apply_measurement(tracks_.back(), oi);
    tracks_.back().last_update = t;
  }

  if (t - last_publish_ >= params_.publish_period) {
    for (const auto& tr : tracks_) publish(tr, store, false);
    last_publish_ = t;
  }
  retire(t, params_.freeze_ttl, store);
}

void Tracker::flush(kb::KnowledgeBase& store) const {
  for (const auto& tr : tracks_) publish(tr, store, false);
}

void Tracker::retire(double now, double ttl, kb::KnowledgeBase& store) {
  std::vector<Track> keep;
  keep.reserve(tracks_.size());
  for (auto& tr : tracks_) {
    if (now - tr.last_update > ttl) {
      publish(tr, store, true);  // frozen instances keep the last position
    } else {
      keep.push_back(std::move(tr));
    }
  }
  tracks_.swap(keep);
}

void Tracker::publish(const Track& track, kb::KnowledgeBase& store, bool frozen) const {
  if (track.trajectory.empty()) return;
  TrackInstance inst;
  inst.uuid = track.instance_uuid;
  inst.class_label = track.class_label;
  inst.position = frozen ? track.trajectory.back().position : track.position;
  inst.velocity = track.velocity;
  inst.bbox = track.bbox;
  inst.trajectory = track.trajectory;
  inst.child_uuids = track.child_uuids;
  inst.last_update = track.last_update;
  inst.frozen = frozen;

  kb::Document doc;
  doc.uuid = inst.uuid;
  doc.layer = kb::Layer::foreground;
  doc.kind = kb::Kind::instance;
  doc.frame = "map";
  doc.last_update = inst.last_update;
  doc.class_label = inst.class_label;
  doc.bbox = inst.bbox;
  doc.links = inst.child_uuids;
  doc.payload = std::move(inst);
  store.upsert(std::move(doc));
}

}  // namespace hiper::tracking
