#include "hiper/sim/frame_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hiper::sim {

using nlohmann::json;

namespace {

json transform_to_json(const Transform& t) {
  json jr = json::array();
  for (double v : t.rotation.m) jr.push_back(v);
  return json{{"r", jr}, {"t", json::array({t.translation.x, t.translation.y, t.translation.z})}};
}

Transform transform_from_json(const json& j) {
  Transform t;
  for (int i = 0; i < 9; ++i) t.rotation.m[i] = j.at("r").at(i);
  t.translation = {j.at("t").at(0), j.at("t").at(1), j.at("t").at(2)};
  return t;
}

}  // namespace

std::string frame_to_record(const SensorFrame& f) {
  json j;
  j["t"] = f.t;
  j["node"] = f.node_id;
  j["cam"] = transform_to_json(f.camera_pose);
  json pts = json::array();
  for (const auto& p : f.points) {
    pts.push_back(p.x);
    pts.push_back(p.y);
    pts.push_back(p.z);
  }
  j["xyz"] = std::move(pts);
  json dets = json::array();
  for (const auto& d : f.detections)
    dets.push_back(json{{"class", d.class_label},
                        {"box", json::array({d.box.u_min, d.box.v_min, d.box.u_max, d.box.v_max})},
                        {"score", d.score}});
  j["detections"] = std::move(dets);
  return j.dump();
}

SensorFrame frame_from_record(const std::string& line) {
  const json j = json::parse(line);
  SensorFrame f;
  f.t = j.at("t");
  f.node_id = j.at("node");
  f.camera_pose = transform_from_json(j.at("cam"));
  const auto& xyz = j.at("xyz");
  if (xyz.size() % 3 != 0) throw std::invalid_argument("frame record: xyz length not divisible by 3");
  for (size_t i = 0; i < xyz.size(); i += 3)
    f.points.push_back({xyz.at(i), xyz.at(i + 1), xyz.at(i + 2)});
  for (const auto& jd : j.at("detections")) {
    Detection2D d;
    d.class_label = jd.at("class");
    d.box = {jd.at("box").at(0), jd.at("box").at(1), jd.at("box").at(2), jd.at("box").at(3)};
    d.score = jd.at("score");
    f.detections.push_back(d);
  }
  return f;
}

void write_frames(std::ostream& out, const std::vector<SensorFrame>& frames) {
  for (const auto& f : frames) out << frame_to_record(f) << "\n";
}

std::vector<SensorFrame> read_frames(std::istream& in) {
  std::vector<SensorFrame> frames;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) frames.push_back(frame_from_record(line));
  }
  return frames;
}

void write_frames_file(const std::string& path, const std::vector<SensorFrame>& frames) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write frame dump: " + path);
  write_frames(out, frames);
}

std::vector<SensorFrame> read_frames_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read frame dump: " + path);
  return read_frames(in);
}

}  // namespace hiper::sim
