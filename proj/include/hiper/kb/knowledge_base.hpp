#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "hiper/core/errors.hpp"
#include "hiper/core/grid.hpp"
#include "hiper/kb/document.hpp"
#include "hiper/sim/simulator.hpp"

namespace hiper::kb {

// In-process document store for the four scene-knowledge layers with
// append-log persistence. One logical writer; query results are copies.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  // Validates the layer/kind table and referential integrity of links;
  // re-upserting an existing uuid replaces the payload atomically.
  std::string upsert(Document doc);

  bool contains(const std::string& uuid) const { return index_.count(uuid) > 0; }
  const Document& get(const std::string& uuid) const;
  Document* get_mutable(const std::string& uuid);
  void erase(const std::string& uuid);
  size_t size() const { return docs_.size(); }

  std::vector<Document> query(const Query& q) const;

  // Pose-graph mirror used to re-anchor node-frame entities.
  void set_node_pose(int node_id, const Transform& pose);
  const std::map<int, Transform>& node_poses() const { return node_poses_; }
  int epoch() const { return epoch_; }

  // Applies a pose-graph optimization: updates mirrored poses and
  // recomputes every instance linking an affected observation. Returns
  // the number of recomputed instances; stale events are no-ops.
  int reanchor(const sim::OptimizationEvent& event);

  // Manipulation workspace interface.
  void configure_workspace(const Aabb& workspace, bool active);
  WorkspaceView workspace_snapshot(double grid_resolution) const;

  // Deterministic uuid generation, one counter per prefix.
  std::string next_uuid(const std::string& prefix);

  void save(const std::string& path) const;
  static KnowledgeBase load(const std::string& path);

  // Iteration in insertion order.
  const std::vector<Document>& documents() const { return docs_; }

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, size_t> index_;
  std::map<int, Transform> node_poses_;
  int epoch_ = 0;
  std::map<std::string, uint64_t> uuid_counters_;
  Aabb workspace_;
  bool workspace_active_ = false;
  bool workspace_configured_ = false;
};

}  // namespace hiper::kb
