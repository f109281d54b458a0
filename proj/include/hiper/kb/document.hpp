#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hiper/core/grid.hpp"
#include "hiper/entities.hpp"

namespace hiper::kb {

enum class Layer { environment, foreground, background, spatial_map };
enum class Kind { observation, instance, analysis, map, meta };

std::string to_string(Layer layer);
std::string to_string(Kind kind);
std::optional<Layer> layer_from_string(const std::string& s);
std::optional<Kind> kind_from_string(const std::string& s);

bool layer_kind_valid(Layer layer, Kind kind);

using Payload =
    std::variant<std::monostate, BackgroundObservation, BackgroundInstance, ForegroundObservation,
                 TrackInstance, DynamicStats, SizeStats, AltitudeStats, HeatmapInfo, MapInfo,
                 EnvironmentInfo>;

struct Document {
  std::string uuid;
  Layer layer = Layer::environment;
  Kind kind = Kind::meta;
  std::string frame = "map";  // "map" or "node:<id>"
  double last_update = 0.0;
  std::string class_label;
  Aabb bbox;
  Payload payload;
  std::vector<std::string> links;
};

struct Query {
  std::optional<std::string> class_label;
  std::optional<Layer> layer;
  std::optional<Kind> kind;
  std::optional<double> time_from;
  std::optional<double> time_to;

  enum class Criterion { none, closest_to, within_fov };
  Criterion criterion = Criterion::none;
  Vec3 point;  // closest_to
  Pose2 fov_pose;
  double fov_angle = 0.0;
  double fov_range = 0.0;
};

struct WorkspaceCell {
  bool occupied = false;
  std::string class_label;
  std::string ods_ref;  // uuid of the class dynamics analysis, if any
};

struct WorkspaceView {
  Aabb workspace;
  bool active = false;
  std::vector<std::pair<Aabb, std::string>> static_part;  // bbox, class
  GridGeometry grid;
  std::vector<WorkspaceCell> dynamic_part;

  size_t occupied_cells() const {
    size_t n = 0;
    for (const auto& c : dynamic_part) n += c.occupied ? 1 : 0;
    return n;
  }
};

std::string document_to_record(const Document& doc);
Document document_from_record(const std::string& line);

}  // namespace hiper::kb
