#include "hiper/entities.hpp"

#include <algorithm>
#include <stdexcept>

#include "hiper/core/errors.hpp"

namespace hiper {

namespace {

std::vector<Vec3> contour_3d(const Plane& plane, const Polygon2& contour) {
  const auto [u, v] = plane.basis();
  std::vector<Vec3> out;
  out.reserve(contour.size());
  for (const auto& q : contour) out.push_back(plane.from_plane(q, u, v));
  return out;
}

}  // namespace

OrientedBox plane_contour_box(const Plane& plane, const Polygon2& contour, double thickness) {
  const auto [u, v] = plane.basis();
  double u_min = 1e30, u_max = -1e30, v_min = 1e30, v_max = -1e30;
  for (const auto& q : contour) {
    u_min = std::min(u_min, q.x);
    u_max = std::max(u_max, q.x);
    v_min = std::min(v_min, q.y);
    v_max = std::max(v_max, q.y);
  }
  OrientedBox box;
  box.axes = Mat3::from_columns(u, v, plane.normal);
  box.center = plane.from_plane({(u_min + u_max) / 2.0, (v_min + v_max) / 2.0}, u, v);
  box.half_extents = {(u_max - u_min) / 2.0, (v_max - v_min) / 2.0, thickness / 2.0};
  return box;
}

std::vector<Vec3> BackgroundObservation::contour_points_3d() const {
  return contour_3d(plane, contour);
}

std::vector<Vec3> BackgroundInstance::contour_points_3d() const {
  return contour_3d(plane, contour);
}

void remerge_background_instance(BackgroundInstance& instance,
                                 const std::vector<const BackgroundObservation*>& children,
                                 const std::map<int, Transform>& node_poses) {
  if (children.empty()) throw std::invalid_argument("instance without children");

  // Map-frame planes and contour points of every child, in child order.
  struct ChildGeom {
    Plane plane;
    std::vector<Vec3> points;
    double area;
  };
  std::vector<ChildGeom> geoms;
  geoms.reserve(children.size());
  for (const auto* obs : children) {
    const auto it = node_poses.find(obs->node_id);
    if (it == node_poses.end())
      throw NotFoundError("node pose missing for observation " + obs->uuid);
    const Transform& pose = it->second;
    ChildGeom g;
    const Vec3 n_map = pose.rotate(obs->plane.normal);
    const Vec3 on_plane = pose.apply(obs->plane.normal * obs->plane.offset);
    g.plane = Plane{n_map, n_map.dot(on_plane)}.canonical();
    for (const auto& p : obs->contour_points_3d()) g.points.push_back(pose.apply(p));
    g.area = obs->contour_area();
    geoms.push_back(std::move(g));
  }

  // Area-weighted mean plane.
  Vec3 n_acc;
  Vec3 centroid_acc;
  double w_acc = 0.0;
  for (const auto& g : geoms) {
    n_acc += g.plane.normal * g.area;
    Vec3 c;
    for (const auto& p : g.points) c += p;
    centroid_acc += c * (g.area / static_cast<double>(g.points.size()));
    w_acc += g.area;
  }
  const Vec3 n = n_acc.normalized();
  const Vec3 centroid = centroid_acc * (1.0 / w_acc);
  Plane merged{n, n.dot(centroid)};
  merged = merged.canonical();

  // Children contours projected onto the merged plane, then hulled.
  const auto [u, v] = merged.basis();
  std::vector<Vec2> flat;
  double max_off = 0.0;
  for (const auto& g : geoms) {
    for (const auto& p : g.points) {
      flat.push_back(merged.to_plane(p, u, v));
      max_off = std::max(max_off, std::abs(merged.signed_distance(p)));
    }
  }
  instance.plane = merged;
  instance.contour = convex_hull(std::move(flat));
  instance.bbox = plane_contour_box(merged, instance.contour, std::max(0.04, 2.0 * max_off));
}

void reanchor_track_instance(TrackInstance& instance, const std::map<int, Transform>& node_poses,
                             int node_from, int node_to) {
  bool touched = false;
  for (auto& tp : instance.trajectory) {
    if (tp.node_id < node_from || tp.node_id > node_to) continue;
    const auto it = node_poses.find(tp.node_id);
    if (it == node_poses.end()) throw NotFoundError("node pose missing for trajectory point");
    tp.position = it->second.apply(tp.local);
    touched = true;
  }
  if (touched && !instance.trajectory.empty()) {
    const auto& last = instance.trajectory.back();
    const Vec3 shift = last.position - instance.position;
    instance.position = last.position;
    instance.bbox = {instance.bbox.lo + shift, instance.bbox.hi + shift};
  }
}

}  // namespace hiper
