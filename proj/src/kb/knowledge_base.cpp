#include "hiper/kb/knowledge_base.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hiper/core/errors.hpp"
#include "json.hpp"

namespace hiper::kb {

using nlohmann::json;

std::string KnowledgeBase::upsert(Document doc) {
  if (!layer_kind_valid(doc.layer, doc.kind))
    throw std::invalid_argument("invalid layer/kind combination: " + to_string(doc.layer) + "/" +
                                to_string(doc.kind));
  if (doc.uuid.empty()) throw std::invalid_argument("document needs a uuid");
  if (doc.kind == Kind::instance && doc.links.empty())
    throw std::invalid_argument("instance document must link at least one observation");
  for (const auto& link : doc.links) {
    if (!contains(link)) throw std::invalid_argument("dangling link: " + link);
  }

  const auto it = index_.find(doc.uuid);
  if (it != index_.end()) {
    docs_[it->second] = std::move(doc);
    return docs_[it->second].uuid;
  }
  index_.emplace(doc.uuid, docs_.size());
  docs_.push_back(std::move(doc));
  return docs_.back().uuid;
}

const Document& KnowledgeBase::get(const std::string& uuid) const {
  const auto it = index_.find(uuid);
  if (it == index_.end()) throw NotFoundError("document not found: " + uuid);
  return docs_[it->second];
}

Document* KnowledgeBase::get_mutable(const std::string& uuid) {
  const auto it = index_.find(uuid);
  return it == index_.end() ? nullptr : &docs_[it->second];
}

void KnowledgeBase::erase(const std::string& uuid) {
  const auto it = index_.find(uuid);
  if (it == index_.end()) throw NotFoundError("erase: document not found: " + uuid);
  const size_t pos = it->second;
  docs_.erase(docs_.begin() + static_cast<long>(pos));
  index_.erase(it);
  for (auto& [id, idx] : index_) {
    if (idx > pos) --idx;
  }
}

std::vector<Document> KnowledgeBase::query(const Query& q) const {
  std::vector<Document> out;
  for (const auto& doc : docs_) {
    if (q.class_label && doc.class_label != *q.class_label) continue;
    if (q.layer && doc.layer != *q.layer) continue;
    if (q.kind && doc.kind != *q.kind) continue;
    if (q.time_from && doc.last_update < *q.time_from) continue;
    if (q.time_to && doc.last_update > *q.time_to) continue;

    if (q.criterion == Query::Criterion::within_fov) {
      if (!doc.bbox.valid()) continue;
      const Vec3 c = doc.bbox.center();
      const double dx = c.x - q.fov_pose.x;
      const double dy = c.y - q.fov_pose.y;
      const double dist = std::hypot(dx, dy);
      if (dist > q.fov_range) continue;
      const double bearing = wrap_angle(std::atan2(dy, dx) - q.fov_pose.yaw);
      if (std::abs(bearing) > q.fov_angle / 2.0) continue;
    }
    out.push_back(doc);
  }
  if (q.criterion == Query::Criterion::closest_to) {
    std::stable_sort(out.begin(), out.end(), [&](const Document& a, const Document& b) {
      const double da = a.bbox.valid() ? (a.bbox.center() - q.point).squared_norm() : 1e300;
      const double db = b.bbox.valid() ? (b.bbox.center() - q.point).squared_norm() : 1e300;
      return da < db;
    });
  }
  return out;
}

void KnowledgeBase::set_node_pose(int node_id, const Transform& pose) {
  node_poses_[node_id] = pose;
}

int KnowledgeBase::reanchor(const sim::OptimizationEvent& event) {
  if (event.epoch <= epoch_) return 0;  // stale or replayed event
  epoch_ = event.epoch;

  for (auto& [id, pose] : node_poses_) {
    if (id >= event.node_from && id <= event.node_to) pose = event.correction.compose(pose);
  }

  // Which observations moved?
  std::vector<uint8_t> obs_moved(docs_.size(), 0);
  for (size_t i = 0; i < docs_.size(); ++i) {
    const auto& doc = docs_[i];
    if (doc.kind != Kind::observation) continue;
    if (const auto* o = std::get_if<BackgroundObservation>(&doc.payload)) {
      obs_moved[i] = o->node_id >= event.node_from && o->node_id <= event.node_to;
    } else if (const auto* f = std::get_if<ForegroundObservation>(&doc.payload)) {
      obs_moved[i] = f->node_id >= event.node_from && f->node_id <= event.node_to;
    }
  }

  int recomputed = 0;
  for (auto& doc : docs_) {
    if (doc.kind != Kind::instance) continue;
    if (auto* inst = std::get_if<BackgroundInstance>(&doc.payload)) {
      bool affected = false;
      std::vector<const BackgroundObservation*> children;
      for (const auto& link : doc.links) {
        const auto it = index_.find(link);
        if (it == index_.end()) throw NotFoundError("instance child missing: " + link);
        affected = affected || obs_moved[it->second];
        children.push_back(&std::get<BackgroundObservation>(docs_[it->second].payload));
      }
      if (!affected) continue;
      remerge_background_instance(*inst, children, node_poses_);
      doc.bbox = inst->bbox.aabb();
      ++recomputed;
    } else if (auto* track = std::get_if<TrackInstance>(&doc.payload)) {
      bool affected = false;
      for (const auto& tp : track->trajectory)
        affected = affected || (tp.node_id >= event.node_from && tp.node_id <= event.node_to);
      if (!affected) continue;
      reanchor_track_instance(*track, node_poses_, event.node_from, event.node_to);
      doc.bbox = track->bbox;
      ++recomputed;
    }
  }
  return recomputed;
}

void KnowledgeBase::configure_workspace(const Aabb& workspace, bool active) {
  workspace_ = workspace;
  workspace_active_ = active;
  workspace_configured_ = true;
}

WorkspaceView KnowledgeBase::workspace_snapshot(double grid_resolution) const {
  if (!workspace_configured_ || !workspace_active_)
    throw UnavailableError("workspace interface is not active");
  if (grid_resolution <= 0.0) throw std::invalid_argument("grid resolution must be > 0");

  WorkspaceView view;
  view.workspace = workspace_;
  view.active = true;

  // Per-class dynamics analysis uuids for the ODS reference.
  std::map<std::string, std::string> ods_by_class;
  for (const auto& doc : docs_) {
    if (doc.kind == Kind::analysis && std::holds_alternative<DynamicStats>(doc.payload))
      ods_by_class[doc.class_label] = doc.uuid;
  }

  view.grid.origin_x = workspace_.lo.x;
  view.grid.origin_y = workspace_.lo.y;
  view.grid.resolution = grid_resolution;
  view.grid.width =
      std::max(1, static_cast<int>(std::ceil((workspace_.hi.x - workspace_.lo.x) / grid_resolution)));
  view.grid.height =
      std::max(1, static_cast<int>(std::ceil((workspace_.hi.y - workspace_.lo.y) / grid_resolution)));
  view.dynamic_part.assign(view.grid.size(), WorkspaceCell{});

  for (const auto& doc : docs_) {
    if (doc.kind == Kind::instance && std::holds_alternative<BackgroundInstance>(doc.payload)) {
      if (doc.bbox.valid() && doc.bbox.intersects(workspace_))
        view.static_part.emplace_back(doc.bbox, doc.class_label);
    } else if (doc.kind == Kind::instance && std::holds_alternative<TrackInstance>(doc.payload)) {
      const auto& track = std::get<TrackInstance>(doc.payload);
      if (track.frozen) continue;
      if (!track.bbox.valid() || !track.bbox.intersects(workspace_)) continue;
      const int x0 = std::max(0, view.grid.cell_x(track.bbox.lo.x));
      const int x1 = std::min(view.grid.width - 1, view.grid.cell_x(track.bbox.hi.x));
      const int y0 = std::max(0, view.grid.cell_y(track.bbox.lo.y));
      const int y1 = std::min(view.grid.height - 1, view.grid.cell_y(track.bbox.hi.y));
      const auto ods = ods_by_class.find(doc.class_label);
      for (int iy = y0; iy <= y1; ++iy) {
        for (int ix = x0; ix <= x1; ++ix) {
          auto& cell = view.dynamic_part[iy * view.grid.width + ix];
          cell.occupied = true;
          cell.class_label = doc.class_label;
          if (ods != ods_by_class.end()) cell.ods_ref = ods->second;
        }
      }
    }
  }
  return view;
}

std::string KnowledgeBase::next_uuid(const std::string& prefix) {
  const uint64_t n = uuid_counters_[prefix]++;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%06llu", prefix.c_str(),
                static_cast<unsigned long long>(n));
  return buf;
}

void KnowledgeBase::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write kb file: " + path);
  json meta;
  meta["kb_meta"] = true;
  meta["epoch"] = epoch_;
  json nodes = json::array();
  for (const auto& [id, pose] : node_poses_) {
    json jr = json::array();
    for (double v : pose.rotation.m) jr.push_back(v);
    nodes.push_back(json{{"id", id},
                         {"r", jr},
                         {"t", json::array({pose.translation.x, pose.translation.y,
                                            pose.translation.z})}});
  }
  meta["nodes"] = std::move(nodes);
  json counters = json::object();
  for (const auto& [prefix, n] : uuid_counters_) counters[prefix] = n;
  meta["uuid_counters"] = std::move(counters);
  out << meta.dump() << "\n";
  for (const auto& doc : docs_) out << document_to_record(doc) << "\n";
}

KnowledgeBase KnowledgeBase::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read kb file: " + path);
  KnowledgeBase kb;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      const json meta = json::parse(line);
      if (meta.value("kb_meta", false)) {
        kb.epoch_ = meta.value("epoch", 0);
        for (const auto& jn : meta.value("nodes", json::array())) {
          Transform t;
          for (int i = 0; i < 9; ++i) t.rotation.m[i] = jn.at("r").at(i);
          t.translation = {jn.at("t").at(0), jn.at("t").at(1), jn.at("t").at(2)};
          kb.node_poses_[jn.at("id").get<int>()] = t;
        }
        if (meta.contains("uuid_counters"))
          for (auto it = meta["uuid_counters"].begin(); it != meta["uuid_counters"].end(); ++it)
            kb.uuid_counters_[it.key()] = it.value().get<uint64_t>();
        continue;
      }
      // No meta header; fall through and treat as a document.
    }
    // Insert directly: instances updated in place may link observations
    // that appear later in the log, so links are verified afterwards.
    Document doc = document_from_record(line);
    const auto it = kb.index_.find(doc.uuid);
    if (it != kb.index_.end()) {
      kb.docs_[it->second] = std::move(doc);
    } else {
      kb.index_.emplace(doc.uuid, kb.docs_.size());
      kb.docs_.push_back(std::move(doc));
    }
  }
  for (const auto& doc : kb.docs_) {
    for (const auto& link : doc.links) {
      if (!kb.contains(link))
        throw std::invalid_argument("kb file has a dangling link: " + link);
    }
  }
  return kb;
}

}  // namespace hiper::kb
