#include "hiper/background/background.hpp"

#include <algorithm>
#include <cmath>

#include "hiper/core/errors.hpp"
#include "hiper/core/kernels.hpp"
#include "hiper/core/rng.hpp"

namespace hiper::background {

BackgroundParams BackgroundParams::from_config(const Config& cfg) {
  BackgroundParams p;
  const std::string s = "background";
  p.downsample_leaf = cfg.get_double(s, "downsample_leaf", p.downsample_leaf);
  p.ransac_dist_thresh = cfg.get_double(s, "ransac_dist_thresh", p.ransac_dist_thresh);
  p.ransac_min_inliers = cfg.get_int(s, "ransac_min_inliers", p.ransac_min_inliers);
  p.ransac_max_planes = cfg.get_int(s, "ransac_max_planes", p.ransac_max_planes);
  p.ransac_iterations = cfg.get_int(s, "ransac_iterations", p.ransac_iterations);
  p.floor_max_height = cfg.get_double(s, "floor_max_height", p.floor_max_height);
  p.ceiling_min_height = cfg.get_double(s, "ceiling_min_height", p.ceiling_min_height);
  p.table_min_height = cfg.get_double(s, "table_min_height", p.table_min_height);
  p.table_max_height = cfg.get_double(s, "table_max_height", p.table_max_height);
  p.align_max_offset = cfg.get_double(s, "align_max_offset", p.align_max_offset);
  p.bbox_margin = cfg.get_double(s, "bbox_margin", p.bbox_margin);
  p.contour_overlap_min = cfg.get_double(s, "contour_overlap_min", p.contour_overlap_min);
  return p;
}

std::vector<Vec3> downsample(std::span<const Vec3> points, double leaf) {
  return kernels::voxel_downsample(points, leaf);
}

namespace {

// Smallest eigenvector of a symmetric 3x3 matrix by cyclic Jacobi.
Vec3 smallest_eigenvector(double a00, double a01, double a02, double a11, double a12, double a22) {
  double a[3][3] = {{a00, a01, a02}, {a01, a11, a12}, {a02, a12, a22}};
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int sweep = 0; sweep < 24; ++sweep) {
    double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
    if (off < 1e-15) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (std::abs(a[p][q]) < 1e-18) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  int min_i = 0;
  for (int i = 1; i < 3; ++i)
    if (a[i][i] < a[min_i][min_i]) min_i = i;
  return Vec3{v[0][min_i], v[1][min_i], v[2][min_i]}.normalized();
}

Plane fit_plane_least_squares(std::span<const Vec3> points, const std::vector<int>& idx) {
  Vec3 c;
  for (const int i : idx) c += points[i];
  c = c * (1.0 / idx.size());
  double xx = 0, xy = 0, xz = 0, yy = 0, yz = 0, zz = 0;
  for (const int i : idx) {
    const Vec3 d = points[i] - c;
    xx += d.x * d.x;
    xy += d.x * d.y;
    xz += d.x * d.z;
    yy += d.y * d.y;
    yz += d.y * d.z;
    zz += d.z * d.z;
  }
  const Vec3 n = smallest_eigenvector(xx, xy, xz, yy, yz, zz);
  return Plane{n, n.dot(c)}.canonical();
}

std::optional<Plane> plane_from_three(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  if (n.norm() < 1e-9) return std::nullopt;
  const Vec3 un = n.normalized();
  return Plane{un, un.dot(a)}.canonical();
}

}  // namespace

std::vector<PlaneFit> extract_planes(std::span<const Vec3> points, const BackgroundParams& params,
                                     uint64_t seed_salt) {
  std::vector<PlaneFit> fits;
  if (static_cast<int>(points.size()) < params.ransac_min_inliers) return fits;

  Rng rng = Rng(params.ransac_seed).fork(seed_salt);
  std::vector<int> remaining(points.size());
  for (size_t i = 0; i < remaining.size(); ++i) remaining[i] = static_cast<int>(i);

  std::vector<Vec3> work;
  std::vector<uint8_t> mask;
  while (static_cast<int>(remaining.size()) >= params.ransac_min_inliers &&
         static_cast<int>(fits.size()) < params.ransac_max_planes) {
    work.clear();
    for (const int i : remaining) work.push_back(points[i]);

    Plane best_plane;
    size_t best_count = 0;
    for (int it = 0; it < params.ransac_iterations; ++it) {
      const int n = static_cast<int>(work.size());
      const int i0 = rng.uniform_int(0, n - 1);
      const int i1 = rng.uniform_int(0, n - 1);
      const int i2 = rng.uniform_int(0, n - 1);
      if (i0 == i1 || i1 == i2 || i0 == i2) continue;
      const auto cand = plane_from_three(work[i0], work[i1], work[i2]);
      if (!cand) continue;
      const size_t count =
          kernels::plane_inlier_mask(work, *cand, params.ransac_dist_thresh, mask);
      if (count > best_count) {
        best_count = count;
        best_plane = *cand;
      }
    }
    if (best_count < static_cast<size_t>(params.ransac_min_inliers)) break;

    // Refine on the consensus set, then collect final inliers.
    kernels::plane_inlier_mask(work, best_plane, params.ransac_dist_thresh, mask);
    std::vector<int> inliers_local;
    for (size_t i = 0; i < work.size(); ++i)
      if (mask[i]) inliers_local.push_back(static_cast<int>(i));
    Plane refined = fit_plane_least_squares(work, inliers_local);
    kernels::plane_inlier_mask(work, refined, params.ransac_dist_thresh, mask);
    inliers_local.clear();
    for (size_t i = 0; i < work.size(); ++i)
      if (mask[i]) inliers_local.push_back(static_cast<int>(i));
    if (static_cast<int>(inliers_local.size()) < params.ransac_min_inliers) break;
    refined = fit_plane_least_squares(work, inliers_local);
    kernels::plane_inlier_mask(work, refined, params.ransac_dist_thresh, mask);

    PlaneFit fit;
    fit.plane = refined;
    std::vector<int> next_remaining;
    double height_acc = 0.0;
    for (size_t i = 0; i < work.size(); ++i) {
      if (mask[i]) {
        fit.inliers.push_back(remaining[i]);
        height_acc += work[i].z;
      } else {
        next_remaining.push_back(remaining[i]);
      }
    }
    if (static_cast<int>(fit.inliers.size()) < params.ransac_min_inliers) break;
    fit.mean_height = height_acc / fit.inliers.size();
    fits.push_back(std::move(fit));
    remaining.swap(next_remaining);
  }
  return fits;
}

std::string classify_plane(const Plane& plane, double mean_height,
                           const BackgroundParams& params) {
  const double vertical = std::abs(plane.normal.z);
  if (vertical >= params.vertical_normal_min_dot) {
    if (mean_height < params.floor_max_height) return "floor";
    if (mean_height > params.ceiling_min_height) return "ceiling";
    if (mean_height >= params.table_min_height && mean_height <= params.table_max_height)
      return "table";
    return "unknown";
  }
  if (vertical < params.wall_normal_max_dot) return "wall";
  return "unknown";
}

std::vector<BackgroundObservation> extract_background_observations(
    std::span<const Vec3> camera_points, const Transform& camera_in_robot, int node_id, double t,
    const BackgroundParams& params, kb::KnowledgeBase& store) {
  std::vector<BackgroundObservation> out;
  const std::vector<Vec3> ds = downsample(camera_points, params.downsample_leaf);
  const std::vector<Vec3> robot_pts = kernels::transform_points(ds, camera_in_robot);
  const auto fits = extract_planes(robot_pts, params, static_cast<uint64_t>(node_id));

  for (const auto& fit : fits) {
    const std::string label = classify_plane(fit.plane, fit.mean_height, params);
    if (label == "unknown") continue;

    const auto [u, v] = fit.plane.basis();
    std::vector<Vec2> flat;
    flat.reserve(fit.inliers.size());
    for (const int i : fit.inliers) flat.push_back(fit.plane.to_plane(robot_pts[i], u, v));
    Polygon2 contour = convex_hull(std::move(flat));
    if (polygon_area(contour) < 1e-4) continue;

    BackgroundObservation obs;
    obs.uuid = store.next_uuid("bo");
    obs.class_label = label;
    obs.plane = fit.plane;
    obs.contour = std::move(contour);
    obs.bbox = plane_contour_box(obs.plane, obs.contour, 2.0 * params.ransac_dist_thresh);
    obs.node_id = node_id;
    obs.t = t;

    kb::Document doc;
    doc.uuid = obs.uuid;
    doc.layer = kb::Layer::background;
    doc.kind = kb::Kind::observation;
    doc.frame = "node:" + std::to_string(node_id);
    doc.last_update = t;
    doc.class_label = label;
    doc.bbox = obs.bbox.aabb();
    doc.payload = obs;
    store.upsert(std::move(doc));
    out.push_back(std::move(obs));
  }
  return out;
}

namespace {

struct MapGeometry {
  Plane plane;
  std::vector<Vec3> contour3d;
  Vec3 centroid;
  Polygon2 on_own_plane;
  Aabb bounds;
};

MapGeometry to_map_geometry(const BackgroundObservation& obs, const Transform& pose) {
  MapGeometry g;
  const Vec3 n_map = pose.rotate(obs.plane.normal);
  const Vec3 on_plane = pose.apply(obs.plane.normal * obs.plane.offset);
  g.plane = Plane{n_map, n_map.dot(on_plane)}.canonical();
  const auto [u, v] = g.plane.basis();
  Vec3 acc;
  for (const auto& p : obs.contour_points_3d()) {
    const Vec3 q = pose.apply(p);
    g.contour3d.push_back(q);
    g.on_own_plane.push_back(g.plane.to_plane(q, u, v));
    g.bounds.expand(q);
    acc += q;
  }
  g.centroid = acc * (1.0 / std::max<size_t>(1, g.contour3d.size()));
  return g;
}

}  // namespace

MergeOutcome merge_background_observation(const BackgroundObservation& obs,
                                          const BackgroundParams& params,
                                          kb::KnowledgeBase& store) {
  const auto& poses = store.node_poses();
  const auto pose_it = poses.find(obs.node_id);
  if (pose_it == poses.end())
    throw NotFoundError("merge: no pose for node " + std::to_string(obs.node_id));
  const MapGeometry g = to_map_geometry(obs, pose_it->second);

  // Criteria cascade over background instances, cheap checks first.
  std::vector<std::string> matched;
  for (const auto& doc : store.documents()) {
    if (doc.layer != kb::Layer::background || doc.kind != kb::Kind::instance) continue;
    const auto& inst = std::get<BackgroundInstance>(doc.payload);
    if (inst.class_label != obs.class_label) continue;

    if (std::abs(g.plane.normal.dot(inst.plane.normal)) < params.align_max_angle_dot) continue;
    const std::vector<Vec3> inst_pts = inst.contour_points_3d();
    Vec3 inst_centroid;
    for (const auto& p : inst_pts) inst_centroid += p;
    inst_centroid = inst_centroid * (1.0 / std::max<size_t>(1, inst_pts.size()));
    if (std::abs(g.plane.signed_distance(inst_centroid)) > params.align_max_offset) continue;

    if (!g.bounds.inflated(params.bbox_margin).intersects(inst.bbox.aabb())) continue;

    // Contour overlap on the instance plane.
    const auto [iu, iv] = inst.plane.basis();
    Polygon2 obs_on_inst;
    for (const auto& p : g.contour3d) obs_on_inst.push_back(inst.plane.to_plane(p, iu, iv));
    obs_on_inst = convex_hull(std::move(obs_on_inst));
    const double inter = convex_intersection_area(obs_on_inst, inst.contour);
    const double min_area = std::min(polygon_area(obs_on_inst), inst.contour_area());
    if (min_area <= 0.0 || inter / min_area < params.contour_overlap_min) continue;

    matched.push_back(doc.uuid);
  }

  if (matched.empty()) {
    BackgroundInstance inst;
    inst.uuid = store.next_uuid("bi");
    inst.class_label = obs.class_label;
    inst.child_uuids = {obs.uuid};
    inst.last_update = obs.t;
    inst.synthetic = obs.synthetic;
    remerge_background_instance(inst, {&obs}, poses);

    kb::Document doc;
    doc.uuid = inst.uuid;
    doc.layer = kb::Layer::background;
    doc.kind = kb::Kind::instance;
    doc.frame = "map";
    doc.last_update = obs.t;
    doc.class_label = inst.class_label;
    doc.bbox = inst.bbox.aabb();
    doc.links = inst.child_uuids;
    doc.payload = std::move(inst);
    store.upsert(std::move(doc));
    return MergeOutcome::kNew;
  }

  // Merge into the first match; absorb the children of any duplicates.
  const std::string target_uuid = matched.front();
  std::vector<std::string> children = store.get(target_uuid).links;
  for (size_t i = 1; i < matched.size(); ++i) {
    for (const auto& child : store.get(matched[i]).links) children.push_back(child);
  }
  children.push_back(obs.uuid);
  for (size_t i = 1; i < matched.size(); ++i) store.erase(matched[i]);

  kb::Document* target = store.get_mutable(target_uuid);
  auto& inst = std::get<BackgroundInstance>(target->payload);
  inst.child_uuids = children;
  inst.last_update = obs.t;
  std::vector<const BackgroundObservation*> child_ptrs;
  for (const auto& child : children)
    child_ptrs.push_back(&std::get<BackgroundObservation>(store.get(child).payload));
  remerge_background_instance(inst, child_ptrs, poses);
  target->links = children;
  target->last_update = obs.t;
  target->bbox = inst.bbox.aabb();

  return matched.size() == 1 ? MergeOutcome::kMerged : MergeOutcome::kMergedDedup;
}

void inject_synthetic_planes(const Aabb& map_bounds, int node_id, double t,
                             const BackgroundParams& params, kb::KnowledgeBase& store) {
  const auto make = [&](const std::string& label, double z) {
    BackgroundObservation obs;
    obs.uuid = store.next_uuid("bo");
    obs.class_label = label;
    obs.synthetic = true;
    obs.node_id = node_id;
    obs.t = t;
    // Synthetic planes are authored directly in the node frame assuming
    // the mirrored node pose; identity is fine for the mapping origin.
    const Transform pose = store.node_poses().count(node_id)
                               ? store.node_poses().at(node_id)
                               : Transform::identity();
    const Transform inv = pose.inverse();
    const Vec3 n_local = inv.rotate({0, 0, 1});
    const Vec3 p_local = inv.apply({map_bounds.lo.x, map_bounds.lo.y, z});
    obs.plane = Plane{n_local, n_local.dot(p_local)}.canonical();
    const auto [u, v] = obs.plane.basis();
    std::vector<Vec2> corners;
    for (const auto& [cx, cy] : {std::pair{map_bounds.lo.x, map_bounds.lo.y},
                                 std::pair{map_bounds.hi.x, map_bounds.lo.y},
                                 std::pair{map_bounds.hi.x, map_bounds.hi.y},
                                 std::pair{map_bounds.lo.x, map_bounds.hi.y}}) {
      corners.push_back(obs.plane.to_plane(inv.apply({cx, cy, z}), u, v));
    }
    obs.contour = convex_hull(corners);
    obs.bbox = plane_contour_box(obs.plane, obs.contour, 0.04);

    kb::Document doc;
    doc.uuid = obs.uuid;
    doc.layer = kb::Layer::background;
    doc.kind = kb::Kind::observation;
    doc.frame = "node:" + std::to_string(node_id);
    doc.last_update = t;
    doc.class_label = label;
    doc.bbox = obs.bbox.aabb();
    doc.payload = obs;
    store.upsert(std::move(doc));
    merge_background_observation(obs, params, store);
  };
  make("floor", map_bounds.lo.z);
  make("ceiling", map_bounds.hi.z);
}

}  // namespace hiper::background
