#include "hiper/interp/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hiper/core/kernels.hpp"
#include "json.hpp"

namespace hiper::interp {

using nlohmann::json;

HeatmapParams HeatmapParams::from_config(const Config& cfg) {
  HeatmapParams p;
  const std::string s = "interpretation";
  p.cap = cfg.get_double(s, "heatmap_cap", p.cap);
  p.kernel_floor = cfg.get_double(s, "heatmap_kernel_floor", p.kernel_floor);
  p.kernel_speed_scale = cfg.get_double(s, "heatmap_kernel_speed_scale", p.kernel_speed_scale);
  p.cap_mode = cfg.get_string(s, "heatmap_cap_mode", p.cap_mode);
  return p;
}

Heatmap generate_heatmap(const kb::KnowledgeBase& store, const std::string& class_label,
                         double t_from, double t_to, const GridGeometry& geom, bool inverted,
                         const HeatmapParams& params) {
  if (t_from >= t_to) throw std::invalid_argument("generate_heatmap: t_from must be < t_to");

  // Trajectory points of matching instances inside the window, and the
  // learned mean speed for the kernel width.
  std::vector<Vec2> points;
  double mean_speed = 0.0;
  for (const auto& doc : store.documents()) {
    if (doc.class_label != class_label) continue;
    if (const auto* track = std::get_if<TrackInstance>(&doc.payload)) {
      for (const auto& tp : track->trajectory) {
        if (tp.t >= t_from && tp.t <= t_to) points.push_back(tp.position.xy());
      }
    } else if (const auto* dyn = std::get_if<DynamicStats>(&doc.payload)) {
      mean_speed = dyn->mean_speed;
    }
  }

  Heatmap map;
  map.class_label = class_label;
  map.t_from = t_from;
  map.t_to = t_to;
  map.inverted = inverted;
  map.cap = params.cap;
  map.grid.geom = geom;

  const double sigma =
      std::max(params.kernel_floor, mean_speed * params.kernel_speed_scale);
  std::vector<double> cells;
  kernels::splat_gaussian(geom, points, sigma, params.kernel_cutoff_sigmas, cells);

  if (params.cap_mode != "normalize") {
    for (auto& v : cells) v = std::min(v, params.cap);
  } else {
    double peak = 0.0;
    for (const double v : cells) peak = std::max(peak, v);
    if (peak > 0.0) {
      const double scale = params.cap / peak;
      for (auto& v : cells) v = std::min(params.cap, v * scale);
    }
  }
  if (inverted) {
    for (auto& v : cells) v = params.cap - v;
  }
  map.grid.cells = std::move(cells);
  return map;
}

Heatmap invert(const Heatmap& in) {
  Heatmap out = in;
  out.inverted = !in.inverted;
  for (auto& v : out.grid.cells) v = in.cap - v;
  return out;
}

Costmap overlay_costmap(const Heatmap& heat, const Costmap& base, double weight) {
  if (!(heat.grid.geom == base.geom))
    throw std::invalid_argument("overlay_costmap: grid geometry mismatch");
  Costmap out = base;
  for (int i = 0; i < base.geom.size(); ++i) {
    if (out.cells[i] >= kLethalCost) continue;  // lethal stays lethal
    const double c = out.cells[i] + weight * heat.grid.cells[i];
    out.cells[i] = static_cast<float>(std::min<double>(kMaxNonLethalCost, c));
  }
  return out;
}

namespace {

void write_pgm(const std::string& path, const GridGeometry& geom,
               const std::vector<double>& values, double scale_max) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write graymap: " + path);
  out << "P2\n" << geom.width << " " << geom.height << "\n255\n";
  for (int iy = 0; iy < geom.height; ++iy) {
    for (int ix = 0; ix < geom.width; ++ix) {
      const double v = values[iy * geom.width + ix];
      const int g = std::clamp(static_cast<int>(std::lround(v / scale_max * 255.0)), 0, 255);
      out << g << (ix + 1 == geom.width ? "" : " ");
    }
    out << "\n";
  }
}

std::vector<double> read_pgm(const std::string& path, GridGeometry& geom, double scale_max) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read graymap: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P2") throw std::invalid_argument("expected plain P2 graymap: " + path);
  int w, h, maxval;
  in >> w >> h >> maxval;
  geom.width = w;
  geom.height = h;
  std::vector<double> values(static_cast<size_t>(w) * h, 0.0);
  for (auto& v : values) {
    int g;
    in >> g;
    v = g / 255.0 * scale_max;
  }
  return values;
}

std::string sidecar_path(const std::string& pgm_path) { return pgm_path + ".json"; }

}  // namespace

void save_heatmap(const Heatmap& map, const std::string& pgm_path) {
  write_pgm(pgm_path, map.grid.geom, map.grid.cells, map.cap);
  json meta;
  meta["type"] = "heatmap";
  meta["class"] = map.class_label;
  meta["window"] = json::array({map.t_from, map.t_to});
  meta["inverted"] = map.inverted;
  meta["cap"] = map.cap;
  meta["origin"] = json::array({map.grid.geom.origin_x, map.grid.geom.origin_y});
  meta["resolution"] = map.grid.geom.resolution;
  std::ofstream side(sidecar_path(pgm_path));
  side << meta.dump(2) << "\n";
}

Heatmap load_heatmap(const std::string& pgm_path) {
  std::ifstream side(sidecar_path(pgm_path));
  if (!side) throw std::invalid_argument("missing heatmap sidecar for " + pgm_path);
  json meta;
  side >> meta;
  Heatmap map;
  map.class_label = meta.at("class");
  map.t_from = meta.at("window").at(0);
  map.t_to = meta.at("window").at(1);
  map.inverted = meta.at("inverted");
  map.cap = meta.at("cap");
  map.grid.geom.origin_x = meta.at("origin").at(0);
  map.grid.geom.origin_y = meta.at("origin").at(1);
  map.grid.geom.resolution = meta.at("resolution");
  map.grid.cells = read_pgm(pgm_path, map.grid.geom, map.cap);
  return map;
}

void save_costmap(const Costmap& map, const std::string& pgm_path) {
  std::vector<double> values(map.cells.begin(), map.cells.end());
  write_pgm(pgm_path, map.geom, values, kLethalCost);
  json meta;
  meta["type"] = "costmap";
  meta["origin"] = json::array({map.geom.origin_x, map.geom.origin_y});
  meta["resolution"] = map.geom.resolution;
  std::ofstream side(sidecar_path(pgm_path));
  side << meta.dump(2) << "\n";
}

Costmap load_costmap(const std::string& pgm_path) {
  std::ifstream side(sidecar_path(pgm_path));
  if (!side) throw std::invalid_argument("missing costmap sidecar for " + pgm_path);
  json meta;
  side >> meta;
  Costmap map;
  map.geom.origin_x = meta.at("origin").at(0);
  map.geom.origin_y = meta.at("origin").at(1);
  map.geom.resolution = meta.at("resolution");
  const auto values = read_pgm(pgm_path, map.geom, kLethalCost);
  map.cells.assign(values.begin(), values.end());
  return map;
}

}  // namespace hiper::interp
