#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "hiper/background/background.hpp"
#include "hiper/core/rng.hpp"
#include "hiper/kb/knowledge_base.hpp"

using namespace hiper;
using namespace hiper::kb;

namespace {

Document make_instance_doc(KnowledgeBase& store, const std::string& class_label, Vec3 center,
                           double t) {
  // Minimal observation + track-instance pair.
  ForegroundObservation obs;
  obs.uuid = store.next_uuid("fo");
  obs.class_label = class_label;
  obs.node_id = 0;
  obs.t = t;
  obs.blob.centroid = {0, 0, 0};
  obs.blob.bbox3d = Aabb::from_center_size({0, 0, 0}, {0.4, 0.4, 1.6});
  Document obs_doc;
  obs_doc.uuid = obs.uuid;
  obs_doc.layer = Layer::foreground;
  obs_doc.kind = Kind::observation;
  obs_doc.frame = "node:0";
  obs_doc.last_update = t;
  obs_doc.class_label = class_label;
  obs_doc.bbox = obs.blob.bbox3d;
  obs_doc.payload = obs;
  store.upsert(obs_doc);

  TrackInstance inst;
  inst.uuid = store.next_uuid("fi");
  inst.class_label = class_label;
  inst.position = center;
  inst.bbox = Aabb::from_center_size(center, {0.4, 0.4, 1.6});
  inst.trajectory = {{t, center, 0, center}};
  inst.child_uuids = {obs.uuid};
  inst.last_update = t;
  Document doc;
  doc.uuid = inst.uuid;
  doc.layer = Layer::foreground;
  doc.kind = Kind::instance;
  doc.frame = "map";
  doc.last_update = t;
  doc.class_label = class_label;
  doc.bbox = inst.bbox;
  doc.links = inst.child_uuids;
  doc.payload = inst;
  return doc;
}

}  // namespace

TEST_CASE("upsert stores, replaces atomically, and validates") {
  KnowledgeBase store;
  store.set_node_pose(0, Transform::identity());
  Document doc = make_instance_doc(store, "person", {1, 0, 0}, 1.0);
  const std::string uuid = store.upsert(doc);
  const size_t count = store.size();
  CHECK(store.contains(uuid));

  doc.last_update = 2.0;
  store.upsert(doc);
  CHECK(store.size() == count);  // replace, not insert
  CHECK(store.get(uuid).last_update == doctest::Approx(2.0));

  SUBCASE("invalid layer/kind is rejected") {
    Document bad;
    bad.uuid = "x";
    bad.layer = Layer::environment;
    bad.kind = Kind::observation;
    CHECK_THROWS_AS(store.upsert(bad), std::invalid_argument);
  }
  SUBCASE("dangling link is rejected") {
    Document bad = make_instance_doc(store, "person", {0, 0, 0}, 1.0);
    bad.links = {"missing-uuid"};
    CHECK_THROWS_AS(store.upsert(bad), std::invalid_argument);
  }
  SUBCASE("instances must link observations") {
    Document bad = make_instance_doc(store, "person", {0, 0, 0}, 1.0);
    bad.links.clear();
    CHECK_THROWS_AS(store.upsert(bad), std::invalid_argument);
  }
}

TEST_CASE("layer/kind compatibility table") {
  CHECK(layer_kind_valid(Layer::environment, Kind::meta));
  CHECK_FALSE(layer_kind_valid(Layer::environment, Kind::instance));
  CHECK(layer_kind_valid(Layer::background, Kind::observation));
  CHECK(layer_kind_valid(Layer::foreground, Kind::analysis));
  CHECK(layer_kind_valid(Layer::spatial_map, Kind::map));
  CHECK_FALSE(layer_kind_valid(Layer::spatial_map, Kind::instance));
}

TEST_CASE("closest_to orders by center distance") {
  KnowledgeBase store;
  store.set_node_pose(0, Transform::identity());
  auto near = make_instance_doc(store, "table", {1, 0, 0}, 1.0);
  auto far = make_instance_doc(store, "table", {3, 0, 0}, 1.0);
  store.upsert(far);
  store.upsert(near);
  Query q;
  q.class_label = "table";
  q.kind = Kind::instance;
  q.criterion = Query::Criterion::closest_to;
  q.point = {0, 0, 0};
  const auto out = store.query(q);
  REQUIRE(out.size() == 2);
  CHECK(out[0].bbox.center().x == doctest::Approx(1.0));
  CHECK(out[1].bbox.center().x == doctest::Approx(3.0));
}

TEST_CASE("within_fov excludes what is behind the pose") {
  KnowledgeBase store;
  store.set_node_pose(0, Transform::identity());
  store.upsert(make_instance_doc(store, "cup", {2, 0, 0.5}, 1.0));
  store.upsert(make_instance_doc(store, "cup", {-2, 0, 0.5}, 1.0));
  Query q;
  q.class_label = "cup";
  q.kind = Kind::instance;
  q.criterion = Query::Criterion::within_fov;
  q.fov_pose = {0, 0, 0};  // looking along +x
  q.fov_angle = 1.0;
  q.fov_range = 5.0;
  const auto out = store.query(q);
  REQUIRE(out.size() == 1);
  CHECK(out[0].bbox.center().x == doctest::Approx(2.0));
}

TEST_CASE("time-window query matches a linear scan oracle") {
  KnowledgeBase store;
  store.set_node_pose(0, Transform::identity());
  Rng rng(13);
  for (int i = 0; i < 120; ++i) {
    const std::string cls = i % 3 == 0 ? "person" : (i % 3 == 1 ? "bottle" : "cart");
    store.upsert(make_instance_doc(store, cls, {rng.uniform(-5, 5), rng.uniform(-5, 5), 0.8},
                                   rng.uniform(0, 3600)));
  }
  Query q;
  q.class_label = "person";
  q.kind = Kind::instance;
  q.time_from = 600.0;
  q.time_to = 1800.0;
  const auto got = store.query(q);

  size_t expected = 0;
  for (const auto& doc : store.documents()) {
    if (doc.kind == Kind::instance && doc.class_label == "person" && doc.last_update >= 600.0 &&
        doc.last_update <= 1800.0)
      ++expected;
  }
  CHECK(got.size() == expected);
  CHECK(expected > 0);
  for (const auto& doc : got) {
    CHECK(doc.class_label == "person");
    CHECK(doc.last_update >= 600.0);
    CHECK(doc.last_update <= 1800.0);
  }
}

TEST_CASE("store-save-load round-trips every document") {
  KnowledgeBase store;
  store.set_node_pose(0, {Mat3::from_yaw(0.2), {1, 2, 0}});
  store.upsert(make_instance_doc(store, "person", {1, 2, 0.8}, 5.0));
  store.upsert(make_instance_doc(store, "bottle", {0, 1, 0.9}, 6.0));

  const std::string path = (std::filesystem::temp_directory_path() / "kb_roundtrip.kb").string();
  store.save(path);
  const KnowledgeBase loaded = KnowledgeBase::load(path);
  REQUIRE(loaded.size() == store.size());
  for (const auto& doc : store.documents()) {
    CHECK(document_to_record(loaded.get(doc.uuid)) == document_to_record(doc));
  }
  CHECK(loaded.node_poses().size() == 1);
  std::remove(path.c_str());
}

TEST_CASE("frame discipline: observations are node-anchored") {
  KnowledgeBase store;
  store.set_node_pose(0, Transform::identity());
  store.upsert(make_instance_doc(store, "person", {1, 0, 0}, 1.0));
  for (const auto& doc : store.documents()) {
    if (doc.kind == Kind::observation) CHECK(doc.frame.rfind("node:", 0) == 0);
    if (doc.kind == Kind::instance) CHECK(doc.frame == "map");
  }
}

namespace {

// One wall observed from one node, merged into an instance.
void seed_background_wall(KnowledgeBase& store, int node_id, const Transform& pose) {
  store.set_node_pose(node_id, pose);
  const Transform inv = pose.inverse();
  BackgroundObservation obs;
  obs.uuid = store.next_uuid("bo");
  obs.class_label = "wall";
  obs.node_id = node_id;
  obs.t = 1.0;
  const Vec3 n_map{0, -1, 0};
  const Vec3 n_local = inv.rotate(n_map);
  const Vec3 p_local = inv.apply({0, 4, 1.25});
  obs.plane = Plane{n_local, n_local.dot(p_local)}.canonical();
  const auto [u, v] = obs.plane.basis();
  std::vector<Vec2> corners;
  for (const Vec3& c :
       {Vec3{-2, 4, 0.5}, Vec3{2, 4, 0.5}, Vec3{2, 4, 2.0}, Vec3{-2, 4, 2.0}})
    corners.push_back(obs.plane.to_plane(inv.apply(c), u, v));
  obs.contour = convex_hull(corners);
  obs.bbox = plane_contour_box(obs.plane, obs.contour, 0.04);

  Document doc;
  doc.uuid = obs.uuid;
  doc.layer = Layer::background;
  doc.kind = Kind::observation;
  doc.frame = "node:" + std::to_string(node_id);
  doc.last_update = 1.0;
  doc.class_label = "wall";
  doc.bbox = obs.bbox.aabb();
  doc.payload = obs;
  store.upsert(doc);
  background::BackgroundParams params;
  background::merge_background_observation(obs, params, store);
}

const BackgroundInstance& only_background_instance(const KnowledgeBase& store) {
  const BackgroundInstance* found = nullptr;
  for (const auto& doc : store.documents()) {
    if (const auto* inst = std::get_if<BackgroundInstance>(&doc.payload)) {
      REQUIRE(found == nullptr);
      found = inst;
    }
  }
  REQUIRE(found != nullptr);
  return *found;
}

}  // namespace

TEST_CASE("reanchor recomputes instances and ignores stale events") {
  KnowledgeBase store;
  seed_background_wall(store, 7, Pose2{0.5, -0.5, 0.1}.to_transform());
  const Vec3 before = only_background_instance(store).bbox.center;

  SUBCASE("identity correction: epoch bumps, geometry fixed") {
    sim::OptimizationEvent event{1, Transform::identity(), 0, 100};
    CHECK(store.reanchor(event) == 1);
    CHECK(store.epoch() == 1);
    const Vec3 after = only_background_instance(store).bbox.center;
    CHECK(after.x == doctest::Approx(before.x).epsilon(1e-12));
    CHECK(after.y == doctest::Approx(before.y).epsilon(1e-12));
  }

  SUBCASE("translation correction moves the instance accordingly") {
    Transform corr;
    corr.translation = {0.1, 0, 0};
    sim::OptimizationEvent event{1, corr, 0, 100};
    CHECK(store.reanchor(event) == 1);
    const Vec3 after = only_background_instance(store).bbox.center;
    CHECK(after.x == doctest::Approx(before.x + 0.1).epsilon(1e-9));
    CHECK(after.y == doctest::Approx(before.y).epsilon(1e-9));

    // Replaying the same epoch is a no-op.
    CHECK(store.reanchor(event) == 0);
    const Vec3 again = only_background_instance(store).bbox.center;
    CHECK(again.x == doctest::Approx(after.x).epsilon(1e-15));
  }

  SUBCASE("events outside the anchored range recompute nothing") {
    Transform corr;
    corr.translation = {0.1, 0, 0};
    sim::OptimizationEvent event{1, corr, 90, 95};
    CHECK(store.reanchor(event) == 0);
  }
}

TEST_CASE("workspace snapshot") {
  KnowledgeBase store;
  store.set_node_pose(0, Transform::identity());

  SUBCASE("inactive workspace is unavailable") {
    CHECK_THROWS_AS(store.workspace_snapshot(0.05), UnavailableError);
    store.configure_workspace(Aabb::from_center_size({0, 0, 0.8}, {2, 2, 1.5}), false);
    CHECK_THROWS_AS(store.workspace_snapshot(0.05), UnavailableError);
  }

  SUBCASE("empty workspace yields empty parts") {
    store.configure_workspace(Aabb::from_center_size({0, 0, 0.8}, {2, 2, 1.5}), true);
    const auto view = store.workspace_snapshot(0.05);
    CHECK(view.static_part.empty());
    CHECK(view.occupied_cells() == 0);
  }

  SUBCASE("bottle track occupies labeled cells") {
    store.configure_workspace(Aabb::from_center_size({0, 0, 0.8}, {2, 2, 1.5}), true);
    Document doc = make_instance_doc(store, "bottle", {0.2, 0.1, 0.9}, 3.0);
    auto& inst = std::get<TrackInstance>(doc.payload);
    inst.bbox = Aabb::from_center_size({0.2, 0.1, 0.9}, {0.1, 0.1, 0.3});
    doc.bbox = inst.bbox;
    store.upsert(doc);
    const auto view = store.workspace_snapshot(0.05);
    CHECK(view.occupied_cells() > 0);
    bool labeled = false;
    for (const auto& cell : view.dynamic_part)
      labeled = labeled || (cell.occupied && cell.class_label == "bottle");
    CHECK(labeled);
  }
}
