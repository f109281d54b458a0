#include "hiper/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hiper/core/errors.hpp"

namespace hiper::sim {

namespace {

// Ray vs axis-aligned box given in a local frame; returns entry distance.
std::optional<double> ray_box(const Vec3& o, const Vec3& d, const Vec3& half) {
  double t0 = 0.0, t1 = std::numeric_limits<double>::max();
  const double od[3] = {o.x, o.y, o.z};
  const double dd[3] = {d.x, d.y, d.z};
  const double hh[3] = {half.x, half.y, half.z};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(dd[i]) < 1e-12) {
      if (std::abs(od[i]) > hh[i]) return std::nullopt;
      continue;
    }
    double ta = (-hh[i] - od[i]) / dd[i];
    double tb = (hh[i] - od[i]) / dd[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return t0 > 1e-9 ? std::optional<double>(t0) : std::nullopt;
}

std::optional<double> ray_rect(const Vec3& o, const Vec3& d, const SurfaceSpec& s) {
  const Plane pl = s.plane();
  const double denom = pl.normal.dot(d);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double t = (pl.offset - pl.normal.dot(o)) / denom;
  if (t <= 1e-9) return std::nullopt;
  const Vec3 hit = o + d * t;
  const auto [u, v] = pl.basis();
  const Vec3 rel = hit - s.center;
  if (std::abs(u.dot(rel)) > s.extents.x / 2.0 + 1e-12) return std::nullopt;
  if (std::abs(v.dot(rel)) > s.extents.y / 2.0 + 1e-12) return std::nullopt;
  return t;
}

std::optional<double> ray_yaw_box(const Vec3& o, const Vec3& d, const Vec3& center, double yaw,
                                  const Vec3& size) {
  const Mat3 r = Mat3::from_yaw(-yaw);
  return ray_box(r * (o - center), r * d, size * 0.5);
}

PixelRect clip_rect(const PixelRect& r, int w, int h) {
  return {std::max(r.u_min, 0.0), std::max(r.v_min, 0.0), std::min(r.u_max, double(w)),
          std::min(r.v_max, double(h))};
}

}  // namespace

Simulator::Simulator(WorldSpec world, SimConfig cfg)
    : world_(std::move(world)), cfg_(cfg), detector_rng_(Rng(world_.seed).fork(0xdecaf)) {
  world_.validate();
  if (auto it = world_.keypoints.find("idle"); it != world_.keypoints.end())
    robot_ = Pose2{it->second.x, it->second.y, 0.0};
}

void Simulator::spawn_agents() {
  if (agents_spawned_) return;
  const Rng base(world_.seed);
  agents_.clear();
  for (const auto& spec : world_.agents) {
    AgentState st;
    st.position = spec.start;
    st.rng = base.fork(0x0a6e57 + static_cast<uint64_t>(spec.id));
    agents_.push_back(st);
  }
  agents_spawned_ = true;
}

void Simulator::set_speed(double v) { speed_command_ = std::clamp(v, 0.0, cfg_.max_speed); }

void Simulator::set_path(std::vector<Vec2> waypoints) {
  path_.assign(waypoints.begin(), waypoints.end());
}

void Simulator::clear_path() { path_.clear(); }

void Simulator::advance_agent(const AgentSpec& spec, AgentState& st, double dt) {
  double remaining = dt;
  int guard = 0;
  while (remaining > 1e-12 && ++guard < 64) {
    if (st.dwell_left > 0.0) {
      const double used = std::min(st.dwell_left, remaining);
      st.dwell_left -= used;
      remaining -= used;
      continue;
    }
    if (!st.has_goal) {
      if (spec.random_walk) {
        const Aabb& b = world_.map_bounds;
        const double margin = 0.4;
        st.goal = {st.rng.uniform(b.lo.x + margin, b.hi.x - margin),
                   st.rng.uniform(b.lo.y + margin, b.hi.y - margin)};
        st.has_goal = true;
      } else if (!spec.script.empty()) {
        st.goal = spec.script[st.next_waypoint].position;
        st.has_goal = true;
      } else {
        return;  // static agent
      }
    }
    const Vec2 to_goal = st.goal - st.position;
    const double dist = to_goal.norm();
    if (spec.speed <= 0.0) return;
    const double reach = spec.speed * remaining;
    if (reach >= dist) {
      st.position = st.goal;
      remaining -= dist / spec.speed;
      st.has_goal = false;
      if (!spec.random_walk && !spec.script.empty()) {
        st.dwell_left = spec.script[st.next_waypoint].dwell_seconds;
        st.next_waypoint = (st.next_waypoint + 1) % spec.script.size();
      }
    } else {
      st.position = st.position + to_goal * (reach / dist);
      remaining = 0.0;
    }
  }
}

void Simulator::step(double dt) {
  if (dt <= 0.0) throw std::invalid_argument("step: dt must be > 0");
  if (agents_spawned_) {
    for (size_t i = 0; i < agents_.size(); ++i) advance_agent(world_.agents[i], agents_[i], dt);
  }
  // Scanning in place blocks translation until the spin completes.
  double remaining = dt;
  if (spin_left_ > 1e-9) {
    const double turn = std::min(spin_left_, spin_rate_ * remaining);
    robot_.yaw = wrap_angle(robot_.yaw + turn);
    spin_left_ -= turn;
    remaining -= turn / spin_rate_;
    if (remaining <= 1e-12) {
      t_ += dt;
      return;
    }
  }
  // Robot path following; heading snaps to the travel direction.
  const double v = std::clamp(speed_command_, 0.0, cfg_.max_speed);
  while (!path_.empty() && remaining > 1e-12 && v > 0.0) {
    const Vec2 target = path_.front();
    const Vec2 to_target = target - Vec2{robot_.x, robot_.y};
    const double dist = to_target.norm();
    if (dist < 1e-9) {
      path_.pop_front();
      continue;
    }
    robot_.yaw = std::atan2(to_target.y, to_target.x);
    const double reach = v * remaining;
    if (reach >= dist) {
      robot_.x = target.x;
      robot_.y = target.y;
      remaining -= dist / v;
      path_.pop_front();
    } else {
      robot_.x += to_target.x / dist * reach;
      robot_.y += to_target.y / dist * reach;
      remaining = 0.0;
    }
  }
  t_ += dt;
}

Simulator::RayHit Simulator::cast_ray(const Vec3& origin, const Vec3& dir,
                                      double max_range) const {
  RayHit best;
  best.dist = max_range;
  for (size_t i = 0; i < world_.surfaces.size(); ++i) {
    if (const auto t = ray_rect(origin, dir, world_.surfaces[i]); t && *t < best.dist) {
      best.dist = *t;
      best.source = static_cast<int>(i);
    }
  }
  for (const auto& o : world_.objects) {
    if (const auto t = ray_yaw_box(origin, dir, o.position, o.yaw, o.size); t && *t < best.dist) {
      best.dist = *t;
      best.source = kSourceObjectBase + o.id;
    }
  }
  if (agents_spawned_) {
    for (size_t i = 0; i < agents_.size(); ++i) {
      const auto& spec = world_.agents[i];
      const Vec3 center{agents_[i].position.x, agents_[i].position.y, spec.size.z / 2.0};
      if (const auto t = ray_yaw_box(origin, dir, center, 0.0, spec.size); t && *t < best.dist) {
        best.dist = *t;
        best.source = kSourceAgentBase + spec.id;
      }
    }
  }
  if (best.source < 0) best.dist = -1.0;
  return best;
}

SensorFrame Simulator::render_frame() {
  if (t_ <= last_frame_t_)
    throw std::logic_error("render_frame: simulation time has not advanced");
  last_frame_t_ = t_;

  SensorFrame frame;
  frame.t = t_;
  frame.node_id = next_node_++;
  const Transform robot_to_map = robot_.to_transform();
  graph_.nodes[frame.node_id] = robot_to_map;
  const Transform cam_to_map = robot_to_map.compose(cfg_.camera.mount());
  frame.camera_pose = cam_to_map;

  const int nu = cfg_.camera.rays_u;
  const int nv = cfg_.camera.rays_v;
  const int total = nu * nv;
  std::vector<RayHit> hits(total);
  std::vector<Vec3> dirs(total);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < total; ++r) {
    const int iu = r % nu;
    const int iv = r / nu;
    const double az = ((iu + 0.5) / nu - 0.5) * cfg_.camera.hfov;
    const double el = ((iv + 0.5) / nv - 0.5) * cfg_.camera.vfov;
    // Uniform angular grid; camera frame is x right, y down, z forward.
    const Vec3 d_cam = Vec3{std::tan(az), std::tan(el), 1.0}.normalized();
    dirs[r] = d_cam;
    hits[r] = cast_ray(cam_to_map.translation, cam_to_map.rotate(d_cam), cfg_.camera.max_range);
  }
  frame.points.reserve(total / 4);
  frame.point_source.reserve(total / 4);
  for (int r = 0; r < total; ++r) {
    if (hits[r].source < 0) continue;
    frame.points.push_back(dirs[r] * hits[r].dist);
    frame.point_source.push_back(hits[r].source);
  }

  emit_detections(frame, cam_to_map);
  return frame;
}

void Simulator::emit_detections(SensorFrame& frame, const Transform& cam_to_map) {
  const Transform map_to_cam = cam_to_map.inverse();
  const CameraIntrinsics intr = cfg_.camera.intrinsics();
  const DetectorConfig& det = cfg_.detector;

  struct Candidate {
    std::string class_label;
    std::vector<Vec3> corners;  // map frame
    Vec3 center;
    int truth;
    int ray_source;  // matching SensorFrame::point_source code, -1 for decoys
    bool is_decoy;
  };
  std::vector<Candidate> candidates;
  for (const auto& o : world_.objects) {
    OrientedBox box{o.position, Mat3::from_yaw(o.yaw), o.size * 0.5};
    const auto cs = box.corners();
    candidates.push_back(
        {o.class_label, {cs.begin(), cs.end()}, o.position, o.id, kSourceObjectBase + o.id, false});
  }
  if (agents_spawned_) {
    for (size_t i = 0; i < agents_.size(); ++i) {
      const auto& spec = world_.agents[i];
      const Vec3 center{agents_[i].position.x, agents_[i].position.y, spec.size.z / 2.0};
      OrientedBox box{center, Mat3::identity(), spec.size * 0.5};
      const auto cs = box.corners();
      candidates.push_back({spec.class_label,
                            {cs.begin(), cs.end()},
                            center,
                            detection_truth_agent(spec.id),
                            kSourceAgentBase + spec.id,
                            false});
    }
  }
  for (size_t i = 0; i < world_.decoys.size(); ++i) {
    const auto& d = world_.decoys[i];
    const Plane pl{d.normal, d.normal.dot(d.center)};
    const auto [u, v] = pl.basis();
    std::vector<Vec3> cs;
    for (int su : {-1, 1})
      for (int sv : {-1, 1})
        cs.push_back(d.center + u * (su * d.extents.x / 2.0) + v * (sv * d.extents.y / 2.0));
    candidates.push_back({d.detect_as, std::move(cs), d.center,
                          detection_truth_decoy(static_cast<int>(i)), -1, true});
  }

  for (const auto& c : candidates) {
    const Vec3 center_cam = map_to_cam.apply(c.center);
    if (center_cam.z <= 0.05) continue;
    const double dist = center_cam.norm();
    if (dist > det.max_range) continue;

    PixelRect raw{1e30, 1e30, -1e30, -1e30};
    int in_front = 0;
    for (const auto& corner : c.corners) {
      const auto px = intr.project(map_to_cam.apply(corner));
      if (!px) continue;
      ++in_front;
      raw.u_min = std::min(raw.u_min, px->x);
      raw.v_min = std::min(raw.v_min, px->y);
      raw.u_max = std::max(raw.u_max, px->x);
      raw.v_max = std::max(raw.v_max, px->y);
    }
    if (in_front < 2) continue;
    const PixelRect clipped = clip_rect(raw, intr.width, intr.height);
    if (clipped.width() < det.min_box_px || clipped.height() < det.min_box_px) continue;

    // Occlusion: the ray toward the center must reach this candidate.
    const Vec3 dir = (c.center - cam_to_map.translation).normalized();
    const RayHit occ = cast_ray(cam_to_map.translation, dir, det.max_range + 1.0);
    if (c.is_decoy) {
      // A decoy sits flush on its wall; anything clearly in front hides it.
      if (occ.source >= 0 && occ.dist < dist - 0.05) continue;
    } else {
      const bool visible =
          occ.source == c.ray_source || occ.source < 0 || occ.dist > dist - 0.1;
      if (!visible) continue;
    }

    if (detector_rng_.uniform() < det.p_false_negative) continue;

    Detection2D out;
    out.class_label = c.class_label;
    out.truth = c.truth;
    PixelRect noisy{clipped.u_min + detector_rng_.normal(0, det.pixel_sigma),
                    clipped.v_min + detector_rng_.normal(0, det.pixel_sigma),
                    clipped.u_max + detector_rng_.normal(0, det.pixel_sigma),
                    clipped.v_max + detector_rng_.normal(0, det.pixel_sigma)};
    noisy = clip_rect(noisy, intr.width, intr.height);
    if (noisy.width() < 1.0 || noisy.height() < 1.0) continue;
    out.box = noisy;
    out.score = 0.5 + 0.5 * detector_rng_.uniform();
    frame.detections.push_back(out);
  }

  // Clutter false positives anywhere in the image.
  if (detector_rng_.uniform() < det.p_false_positive) {
    std::vector<std::string> vocab;
    for (const auto& o : world_.objects) vocab.push_back(o.class_label);
    for (const auto& a : world_.agents) vocab.push_back(a.class_label);
    if (vocab.empty()) vocab.push_back("person");
    Detection2D fp;
    fp.class_label = vocab[static_cast<size_t>(detector_rng_.uniform_int(
        0, static_cast<int>(vocab.size()) - 1))];
    const double w = detector_rng_.uniform(30, 120);
    const double h = detector_rng_.uniform(30, 120);
    const double u0 = detector_rng_.uniform(0, intr.width - w);
    const double v0 = detector_rng_.uniform(0, intr.height - h);
    fp.box = {u0, v0, u0 + w, v0 + h};
    fp.score = 0.5 + 0.5 * detector_rng_.uniform();
    fp.truth = -1;
    frame.detections.push_back(fp);
  }
}

OptimizationEvent Simulator::inject_optimization(const Transform& correction, int node_from,
                                                 int node_to) {
  if (correction.translation.norm() > cfg_.max_correction)
    throw std::invalid_argument("pose correction exceeds configured bound");
  if (!graph_.nodes.count(node_from) || !graph_.nodes.count(node_to) || node_from > node_to)
    throw NotFoundError("inject_optimization: unknown node range");
  for (auto& [id, pose] : graph_.nodes) {
    if (id >= node_from && id <= node_to) pose = correction.compose(pose);
  }
  graph_.epoch += 1;
  return OptimizationEvent{graph_.epoch, correction, node_from, node_to};
}

std::vector<Vec2> Simulator::agent_positions() const {
  std::vector<Vec2> out;
  for (const auto& a : agents_) out.push_back(a.position);
  return out;
}

Vec3 Simulator::object_position(int id) const {
  for (const auto& o : world_.objects)
    if (o.id == id) return o.position;
  throw NotFoundError("object id not in world");
}

}  // namespace hiper::sim
