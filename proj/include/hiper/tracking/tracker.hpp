#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hiper/core/config.hpp"
#include "hiper/entities.hpp"
#include "hiper/kb/knowledge_base.hpp"

namespace hiper::tracking {

struct TrackingParams {
  double process_noise_pos = 0.01;  // m^2 per second
  double process_noise_vel = 0.01;  // (m/s)^2 per second
  double measurement_noise = 0.05;  // m^2, fallback when no class sigma
  double init_velocity_var = 1.0;   // (m/s)^2; velocity always starts at zero
  double decay_tau = 1.0;           // s, coasting velocity decay constant
  double velocity_floor = 1e-3;     // m/s, snapped to exactly zero below
  double freeze_ttl = 5.0;          // s without updates before freezing
  double gate_dt_max = 1.0;         // learned gating active only below this dt
  double base_gate = 1.2;           // m, plausibility gate independent of ODS
  double publish_period = 1.0;      // s between live snapshot upserts

  static TrackingParams from_config(const Config& cfg);
};

// Constant-velocity Kalman track over [position; velocity].
struct Track {
  std::string instance_uuid;
  std::string class_label;
  Vec3 position;
  Vec3 velocity;
  std::array<double, 36> covariance{};  // row-major 6x6
  double last_update = 0.0;
  double last_predict = 0.0;
  bool update_since_predict = true;  // fresh tracks count as updated
  std::vector<TrajectoryPoint> trajectory;
  std::vector<std::string> child_uuids;
  Aabb bbox;  // map frame, from the last matched blob

  double speed() const { return velocity.norm(); }
};

// Per-class measurement noise / gating hooks learned by interpretation.
struct ClassDynamics {
  double sigma = 0.0;   // stationary noise scale
  double gate_cu = 0.0; // upper speed CI used for gating
};

// dt <= 0 throws. Position advances by v*dt; when no update arrived
// since the previous predict the velocity decays by exp(-dt/tau) and
// snaps to zero below the floor. Covariance picks up Q*dt.
void predict(Track& track, double dt, const TrackingParams& params);

// Kalman position update; non-SPD covariance resets to the prior.
void update(Track& track, const Vec3& measured_position, double t,
            const TrackingParams& params, std::optional<double> class_sigma);

struct Association {
  std::vector<std::pair<int, int>> matches;  // (track index, observation index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_observations;
};

// Hungarian association on map-frame centers. Class mismatch is
// forbidden; with dt under gate_dt_max and known class dynamics, pairs
// farther than c_u * dt are forbidden too.
Association associate(const std::vector<Track>& tracks,
                      const std::vector<Vec3>& observation_centers,
                      const std::vector<std::string>& observation_classes, double dt,
                      const TrackingParams& params,
                      const std::map<std::string, ClassDynamics>& class_dynamics);

// Owns the track set; single writer. Publishes live snapshots and
// freezes stale tracks into knowledge-base instances.
class Tracker {
 public:
  explicit Tracker(TrackingParams params) : params_(params) {}

  void set_class_dynamics(const std::string& class_label, const ClassDynamics& dynamics) {
    class_dynamics_[class_label] = dynamics;
  }

  // One MOT cycle: predict to t, associate, update matched tracks,
  // spawn tracks for unmatched observations, retire stale tracks.
  void process(const std::vector<ForegroundObservation>& observations, double t,
               const Transform& node_pose, kb::KnowledgeBase& store);

  // Moves tracks unseen for ttl seconds into frozen instances.
  void retire(double now, double ttl, kb::KnowledgeBase& store);

  // Force-publishes every live track snapshot.
  void flush(kb::KnowledgeBase& store) const;

  const std::vector<Track>& tracks() const { return tracks_; }
  std::vector<Track>& tracks_mutable() { return tracks_; }
  const TrackingParams& params() const { return params_; }

 private:
  void publish(const Track& track, kb::KnowledgeBase& store, bool frozen) const;

  TrackingParams params_;
  std::vector<Track> tracks_;
  std::map<std::string, ClassDynamics> class_dynamics_;
  double last_publish_ = -1e18;
};

}  // namespace hiper::tracking
