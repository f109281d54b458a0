#include "hiper/sim/world.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace hiper::sim {

using nlohmann::json;

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
json vec2_to_json(const Vec2& v) { return json::array({v.x, v.y}); }
Vec3 vec3_from_json(const json& j) { return {j.at(0), j.at(1), j.at(2)}; }
Vec2 vec2_from_json(const json& j) { return {j.at(0), j.at(1)}; }

json aabb_to_json(const Aabb& b) {
  return json{{"lo", vec3_to_json(b.lo)}, {"hi", vec3_to_json(b.hi)}};
}
Aabb aabb_from_json(const json& j) {
  return {vec3_from_json(j.at("lo")), vec3_from_json(j.at("hi"))};
}

}  // namespace

void WorldSpec::validate() const {
  for (const auto& s : surfaces) {
    if (std::abs(s.normal.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("surface normal must be unit length: " + s.true_class);
    if (s.extents.x <= 0 || s.extents.y <= 0)
      throw std::invalid_argument("surface extents must be positive");
  }
  if (!map_bounds.valid()) throw std::invalid_argument("map_bounds invalid");
  for (const auto& a : agents) {
    if (a.speed < 0) throw std::invalid_argument("agent speed must be >= 0");
    for (const auto& wp : a.script) {
      const Vec3 p{wp.position.x, wp.position.y, map_bounds.lo.z};
      if (!map_bounds.contains(p))
        throw std::invalid_argument("agent waypoint outside map bounds");
    }
  }
}

std::string world_to_json(const WorldSpec& w) {
  json j;
  j["name"] = w.name;
  j["seed"] = w.seed;
  j["map_bounds"] = aabb_to_json(w.map_bounds);
  j["surfaces"] = json::array();
  for (const auto& s : w.surfaces)
    j["surfaces"].push_back(json{{"center", vec3_to_json(s.center)},
                                 {"normal", vec3_to_json(s.normal)},
                                 {"extents", vec2_to_json(s.extents)},
                                 {"class", s.true_class}});
  j["decoys"] = json::array();
  for (const auto& d : w.decoys)
    j["decoys"].push_back(json{{"center", vec3_to_json(d.center)},
                               {"normal", vec3_to_json(d.normal)},
                               {"extents", vec2_to_json(d.extents)},
                               {"detect_as", d.detect_as}});
  j["objects"] = json::array();
  for (const auto& o : w.objects)
    j["objects"].push_back(json{{"id", o.id},
                                {"class", o.class_label},
                                {"size", vec3_to_json(o.size)},
                                {"position", vec3_to_json(o.position)},
                                {"yaw", o.yaw}});
  j["agents"] = json::array();
  for (const auto& a : w.agents) {
    json ja{{"id", a.id},        {"class", a.class_label}, {"speed", a.speed},
            {"random_walk", a.random_walk}, {"size", vec3_to_json(a.size)},
            {"start", vec2_to_json(a.start)}};
    ja["script"] = json::array();
    for (const auto& wp : a.script)
      ja["script"].push_back(json{{"position", vec2_to_json(wp.position)},
                                  {"dwell", wp.dwell_seconds}});
    j["agents"].push_back(ja);
  }
  j["keypoints"] = json::object();
  for (const auto& [name, p] : w.keypoints) j["keypoints"][name] = vec2_to_json(p);
  j["regions"] = json::object();
  for (const auto& [name, b] : w.regions) j["regions"][name] = aabb_to_json(b);
  return j.dump(2);
}

WorldSpec world_from_json(const std::string& text) {
  const json j = json::parse(text);
  WorldSpec w;
  w.name = j.value("name", "");
  w.seed = j.value("seed", uint64_t{0});
  w.map_bounds = aabb_from_json(j.at("map_bounds"));
  for (const auto& js : j.value("surfaces", json::array())) {
    SurfaceSpec s;
    s.center = vec3_from_json(js.at("center"));
    s.normal = vec3_from_json(js.at("normal")).normalized();
    s.extents = vec2_from_json(js.at("extents"));
    s.true_class = js.value("class", "unknown");
    w.surfaces.push_back(s);
  }
  for (const auto& jd : j.value("decoys", json::array())) {
    DecoySpec d;
    d.center = vec3_from_json(jd.at("center"));
    d.normal = vec3_from_json(jd.at("normal")).normalized();
    d.extents = vec2_from_json(jd.at("extents"));
    d.detect_as = jd.value("detect_as", "person");
    w.decoys.push_back(d);
  }
  for (const auto& jo : j.value("objects", json::array())) {
    ObjectSpec o;
    o.id = jo.at("id");
    o.class_label = jo.at("class");
    o.size = vec3_from_json(jo.at("size"));
    o.position = vec3_from_json(jo.at("position"));
    o.yaw = jo.value("yaw", 0.0);
    w.objects.push_back(o);
  }
  for (const auto& ja : j.value("agents", json::array())) {
    AgentSpec a;
    a.id = ja.at("id");
    a.class_label = ja.value("class", "person");
    a.speed = ja.value("speed", 0.6);
    a.random_walk = ja.value("random_walk", false);
    if (ja.contains("size")) a.size = vec3_from_json(ja.at("size"));
    if (ja.contains("start")) a.start = vec2_from_json(ja.at("start"));
    for (const auto& jw : ja.value("script", json::array()))
      a.script.push_back({vec2_from_json(jw.at("position")), jw.value("dwell", 0.0)});
    if (a.script.empty() && !ja.contains("start") && !a.random_walk)
      throw std::invalid_argument("agent needs a script, a start, or random_walk");
    if (a.script.empty() == false && !ja.contains("start")) a.start = a.script.front().position;
    w.agents.push_back(a);
  }
  if (j.contains("keypoints"))
    for (auto it = j["keypoints"].begin(); it != j["keypoints"].end(); ++it)
      w.keypoints[it.key()] = vec2_from_json(it.value());
  if (j.contains("regions"))
    for (auto it = j["regions"].begin(); it != j["regions"].end(); ++it)
      w.regions[it.key()] = aabb_from_json(it.value());
  w.validate();
  return w;
}

WorldSpec load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("world file not readable: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return world_from_json(text);
}

void save_world(const WorldSpec& world, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write world file: " + path);
  out << world_to_json(world) << "\n";
}

}  // namespace hiper::sim
