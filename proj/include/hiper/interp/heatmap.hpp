#pragma once

#include <string>
#include <vector>

#include "hiper/core/config.hpp"
#include "hiper/core/grid.hpp"
#include "hiper/kb/knowledge_base.hpp"

namespace hiper::interp {

struct HeatmapParams {
  double cap = 0.8;
  double kernel_floor = 0.15;       // m, minimum kernel sigma
  double kernel_speed_scale = 1.0;  // s, sigma = mean_speed * scale
  double kernel_cutoff_sigmas = 4.0;
  // "clamp" (default): clamp raw kernel sums at cap, so every visited
  // cell saturates toward the occupancy ceiling.
  // "normalize": scale so the peak sits at cap.
  std::string cap_mode = "clamp";

  static HeatmapParams from_config(const Config& cfg);
};

struct Heatmap {
  Grid<double> grid;
  std::string class_label;
  double t_from = 0.0;
  double t_to = 0.0;
  bool inverted = false;
  double cap = 0.8;
};

// Accumulates one Gaussian kernel per trajectory point of the class's
// instances inside [t_from, t_to]; t_from >= t_to throws. Empty data
// gives an all-zero map (all-cap if inverted).
Heatmap generate_heatmap(const kb::KnowledgeBase& store, const std::string& class_label,
                         double t_from, double t_to, const GridGeometry& geom, bool inverted,
                         const HeatmapParams& params);

Heatmap invert(const Heatmap& map);

// cost = base + weight * heat clamped below lethal; lethal stays lethal.
Costmap overlay_costmap(const Heatmap& heat, const Costmap& base, double weight);

// Portable graymap plus a sidecar metadata record next to it.
void save_heatmap(const Heatmap& map, const std::string& pgm_path);
Heatmap load_heatmap(const std::string& pgm_path);

void save_costmap(const Costmap& map, const std::string& pgm_path);
Costmap load_costmap(const std::string& pgm_path);

}  // namespace hiper::interp
