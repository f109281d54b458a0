#include "hiper/kb/document.hpp"

#include <stdexcept>

#include "json.hpp"

namespace hiper::kb {

using nlohmann::json;

std::string to_string(Layer layer) {
  switch (layer) {
    case Layer::environment: return "environment";
    case Layer::foreground: return "foreground";
    case Layer::background: return "background";
    case Layer::spatial_map: return "spatial_map";
  }
  return "?";
}

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::observation: return "observation";
    case Kind::instance: return "instance";
    case Kind::analysis: return "analysis";
    case Kind::map: return "map";
    case Kind::meta: return "meta";
  }
  return "?";
}

std::optional<Layer> layer_from_string(const std::string& s) {
  if (s == "environment") return Layer::environment;
  if (s == "foreground") return Layer::foreground;
  if (s == "background") return Layer::background;
  if (s == "spatial_map") return Layer::spatial_map;
  return std::nullopt;
}

std::optional<Kind> kind_from_string(const std::string& s) {
  if (s == "observation") return Kind::observation;
  if (s == "instance") return Kind::instance;
  if (s == "analysis") return Kind::analysis;
  if (s == "map") return Kind::map;
  if (s == "meta") return Kind::meta;
  return std::nullopt;
}

bool layer_kind_valid(Layer layer, Kind kind) {
  switch (layer) {
    case Layer::environment: return kind == Kind::meta;
    case Layer::foreground:
    case Layer::background:
      return kind == Kind::observation || kind == Kind::instance || kind == Kind::analysis;
    case Layer::spatial_map: return kind == Kind::map || kind == Kind::meta;
  }
  return false;
}

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
Vec3 vec3_from_json(const json& j) { return {j.at(0), j.at(1), j.at(2)}; }

json aabb_to_json(const Aabb& b) {
  return json{{"lo", vec3_to_json(b.lo)}, {"hi", vec3_to_json(b.hi)}};
}
Aabb aabb_from_json(const json& j) {
  return {vec3_from_json(j.at("lo")), vec3_from_json(j.at("hi"))};
}

json plane_to_json(const Plane& p) {
  return json{{"n", vec3_to_json(p.normal)}, {"d", p.offset}};
}
Plane plane_from_json(const json& j) { return {vec3_from_json(j.at("n")), j.at("d")}; }

json polygon_to_json(const Polygon2& poly) {
  json arr = json::array();
  for (const auto& p : poly) {
    arr.push_back(p.x);
    arr.push_back(p.y);
  }
  return arr;
}
Polygon2 polygon_from_json(const json& j) {
  Polygon2 poly;
  for (size_t i = 0; i + 1 < j.size(); i += 2) poly.push_back({j.at(i), j.at(i + 1)});
  return poly;
}

json obox_to_json(const OrientedBox& b) {
  json r = json::array();
  for (double v : b.axes.m) r.push_back(v);
  return json{{"center", vec3_to_json(b.center)}, {"axes", r}, {"half", vec3_to_json(b.half_extents)}};
}
OrientedBox obox_from_json(const json& j) {
  OrientedBox b;
  b.center = vec3_from_json(j.at("center"));
  for (int i = 0; i < 9; ++i) b.axes.m[i] = j.at("axes").at(i);
  b.half_extents = vec3_from_json(j.at("half"));
  return b;
}

struct PayloadWriter {
  json& j;

  void operator()(const std::monostate&) { j["ptype"] = "none"; }
  void operator()(const BackgroundObservation& o) {
    j["ptype"] = "bg_obs";
    j["plane"] = plane_to_json(o.plane);
    j["contour"] = polygon_to_json(o.contour);
    j["obox"] = obox_to_json(o.bbox);
    j["node"] = o.node_id;
    j["t"] = o.t;
    j["synthetic"] = o.synthetic;
  }
  void operator()(const BackgroundInstance& i) {
    j["ptype"] = "bg_inst";
    j["plane"] = plane_to_json(i.plane);
    j["contour"] = polygon_to_json(i.contour);
    j["obox"] = obox_to_json(i.bbox);
    j["synthetic"] = i.synthetic;
  }
  void operator()(const ForegroundObservation& o) {
    j["ptype"] = "fg_obs";
    j["node"] = o.node_id;
    j["t"] = o.t;
    if (o.detection_score) j["score"] = *o.detection_score;
    j["centroid"] = vec3_to_json(o.blob.centroid);
    j["blob_bbox"] = aabb_to_json(o.blob.bbox3d);
    j["region"] = json::array({o.blob.image_region.u_min, o.blob.image_region.v_min,
                               o.blob.image_region.u_max, o.blob.image_region.v_max});
    json pts = json::array();
    for (const auto& p : o.blob.points) {
      pts.push_back(p.x);
      pts.push_back(p.y);
      pts.push_back(p.z);
    }
    j["points"] = std::move(pts);
  }
  void operator()(const TrackInstance& t) {
    j["ptype"] = "track";
    j["position"] = vec3_to_json(t.position);
    j["velocity"] = vec3_to_json(t.velocity);
    j["tbox"] = aabb_to_json(t.bbox);
    j["frozen"] = t.frozen;
    json traj = json::array();
    for (const auto& tp : t.trajectory) {
      traj.push_back(json{{"t", tp.t},
                          {"p", vec3_to_json(tp.position)},
                          {"node", tp.node_id},
                          {"local", vec3_to_json(tp.local)},
                          {"v", tp.speed}});
    }
    j["trajectory"] = std::move(traj);
  }
  void operator()(const DynamicStats& s) {
    j["ptype"] = "dynamics";
    j["sigma"] = s.sigma;
    j["mean_speed"] = s.mean_speed;
    j["ci"] = json::array({s.ci_low, s.ci_high});
    j["ratio"] = s.ratio;
    j["samples"] = s.sample_count;
  }
  void operator()(const SizeStats& s) {
    j["ptype"] = "size";
    j["ci"] = json::array({s.ci_low, s.ci_high});
    j["samples"] = s.sample_count;
  }
  void operator()(const AltitudeStats& s) {
    j["ptype"] = "altitude";
    j["ci"] = json::array({s.ci_low, s.ci_high});
    j["samples"] = s.sample_count;
  }
  void operator()(const HeatmapInfo& h) {
    j["ptype"] = "heatmap";
    j["from"] = h.t_from;
    j["to"] = h.t_to;
    j["inverted"] = h.inverted;
    j["path"] = h.grid_path;
  }
  void operator()(const MapInfo& m) {
    j["ptype"] = "map";
    j["costmap"] = m.costmap_ref;
    j["cloud"] = m.cloud_ref;
  }
  void operator()(const EnvironmentInfo& e) {
    j["ptype"] = "environment";
    j["env_id"] = e.environment_id;
    j["costmap"] = e.costmap_ref;
    json traj = json::array();
    for (const auto& p : e.robot_trajectory) traj.push_back(json::array({p[0], p[1], p[2]}));
    j["trajectory"] = std::move(traj);
  }
};

Payload payload_from_json(const json& j, const Document& doc) {
  const std::string ptype = j.value("ptype", "none");
  if (ptype == "none") return std::monostate{};
  if (ptype == "bg_obs") {
    BackgroundObservation o;
    o.uuid = doc.uuid;
    o.class_label = doc.class_label;
    o.plane = plane_from_json(j.at("plane"));
    o.contour = polygon_from_json(j.at("contour"));
    o.bbox = obox_from_json(j.at("obox"));
    o.node_id = j.at("node");
    o.t = j.at("t");
    o.synthetic = j.value("synthetic", false);
    return o;
  }
  if (ptype == "bg_inst") {
    BackgroundInstance i;
    i.uuid = doc.uuid;
    i.class_label = doc.class_label;
    i.plane = plane_from_json(j.at("plane"));
    i.contour = polygon_from_json(j.at("contour"));
    i.bbox = obox_from_json(j.at("obox"));
    i.child_uuids = doc.links;
    i.last_update = doc.last_update;
    i.synthetic = j.value("synthetic", false);
    return i;
  }
  if (ptype == "fg_obs") {
    ForegroundObservation o;
    o.uuid = doc.uuid;
    o.class_label = doc.class_label;
    o.node_id = j.at("node");
    o.t = j.at("t");
    if (j.contains("score")) o.detection_score = j.at("score").get<double>();
    o.blob.centroid = vec3_from_json(j.at("centroid"));
    o.blob.bbox3d = aabb_from_json(j.at("blob_bbox"));
    o.blob.image_region = {j.at("region").at(0), j.at("region").at(1), j.at("region").at(2),
                           j.at("region").at(3)};
    const auto& pts = j.at("points");
    for (size_t i = 0; i + 2 < pts.size(); i += 3)
      o.blob.points.push_back({pts.at(i), pts.at(i + 1), pts.at(i + 2)});
    return o;
  }
  if (ptype == "track") {
    TrackInstance t;
    t.uuid = doc.uuid;
    t.class_label = doc.class_label;
    t.position = vec3_from_json(j.at("position"));
    t.velocity = vec3_from_json(j.at("velocity"));
    t.bbox = aabb_from_json(j.at("tbox"));
    t.frozen = j.value("frozen", false);
    t.child_uuids = doc.links;
    t.last_update = doc.last_update;
    for (const auto& jt : j.at("trajectory"))
      t.trajectory.push_back({jt.at("t"), vec3_from_json(jt.at("p")), jt.at("node"),
                              vec3_from_json(jt.at("local")), jt.value("v", 0.0)});
    return t;
  }
  if (ptype == "dynamics") {
    DynamicStats s;
    s.class_label = doc.class_label;
    s.sigma = j.at("sigma");
    s.mean_speed = j.at("mean_speed");
    s.ci_low = j.at("ci").at(0);
    s.ci_high = j.at("ci").at(1);
    s.ratio = j.at("ratio");
    s.sample_count = j.at("samples");
    return s;
  }
  if (ptype == "size") {
    SizeStats s;
    s.class_label = doc.class_label;
    s.ci_low = j.at("ci").at(0);
    s.ci_high = j.at("ci").at(1);
    s.sample_count = j.at("samples");
    return s;
  }
  if (ptype == "altitude") {
    AltitudeStats s;
    s.class_label = doc.class_label;
    s.ci_low = j.at("ci").at(0);
    s.ci_high = j.at("ci").at(1);
    s.sample_count = j.at("samples");
    return s;
  }
  if (ptype == "heatmap") {
    HeatmapInfo h;
    h.class_label = doc.class_label;
    h.t_from = j.at("from");
    h.t_to = j.at("to");
    h.inverted = j.at("inverted");
    h.grid_path = j.at("path");
    return h;
  }
  if (ptype == "map") {
    MapInfo m;
    m.costmap_ref = j.at("costmap");
    m.cloud_ref = j.at("cloud");
    return m;
  }
  if (ptype == "environment") {
    EnvironmentInfo e;
    e.environment_id = j.at("env_id");
    e.costmap_ref = j.at("costmap");
    for (const auto& jp : j.at("trajectory"))
      e.robot_trajectory.push_back({jp.at(0), jp.at(1), jp.at(2)});
    return e;
  }
  throw std::invalid_argument("unknown payload type: " + ptype);
}

}  // namespace

std::string document_to_record(const Document& doc) {
  json j;
  j["uuid"] = doc.uuid;
  j["layer"] = to_string(doc.layer);
  j["kind"] = to_string(doc.kind);
  j["frame"] = doc.frame;
  j["last_update"] = doc.last_update;
  j["class"] = doc.class_label;
  if (doc.bbox.valid()) j["bbox"] = aabb_to_json(doc.bbox);
  j["links"] = doc.links;
  std::visit(PayloadWriter{j}, doc.payload);
  return j.dump();
}

Document document_from_record(const std::string& line) {
  const json j = json::parse(line);
  Document doc;
  doc.uuid = j.at("uuid");
  const auto layer = layer_from_string(j.at("layer"));
  const auto kind = kind_from_string(j.at("kind"));
  if (!layer || !kind) throw std::invalid_argument("document record: bad layer/kind");
  doc.layer = *layer;
  doc.kind = *kind;
  doc.frame = j.at("frame");
  doc.last_update = j.at("last_update");
  doc.class_label = j.at("class");
  if (j.contains("bbox")) doc.bbox = aabb_from_json(j.at("bbox"));
  doc.links = j.at("links").get<std::vector<std::string>>();
  doc.payload = payload_from_json(j, doc);
  return doc;
}

}  // namespace hiper::kb
