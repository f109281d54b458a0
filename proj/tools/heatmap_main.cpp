// Generates a class heatmap from knowledge-base history and writes a
// portable graymap with a metadata sidecar.

#include <algorithm>
#include <iostream>

#include "CLI11.hpp"
#include "hiper/interp/heatmap.hpp"
#include "hiper/kb/knowledge_base.hpp"

int main(int argc, char** argv) {
  CLI::App app{"heatmap generator"};
  std::string kb_path, class_label, out_path, map_path;
  double t_from = 0.0, t_to = 0.0;
  bool invert = false;
  double resolution = 0.1;
  app.add_option("--kb", kb_path, "kb file")->required();
  app.add_option("--class", class_label, "object class")->required();
  app.add_option("--from", t_from, "window start, seconds")->required();
  app.add_option("--to", t_to, "window end, seconds")->required();
  app.add_flag("--invert", invert, "emit the inverse map");
  app.add_option("--out", out_path, "output graymap path")->required();
  app.add_option("--map", map_path, "costmap graymap providing the grid geometry");
  app.add_option("--resolution", resolution, "grid resolution when no --map is given");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto store = hiper::kb::KnowledgeBase::load(kb_path);
    hiper::GridGeometry geom;
    if (!map_path.empty()) {
      geom = hiper::interp::load_costmap(map_path).geom;
    } else {
      // Fit the grid to the stored map-frame geometry.
      hiper::Aabb bounds;
      for (const auto& doc : store.documents()) {
        if (doc.bbox.valid() && doc.frame == "map") bounds.expand(doc.bbox);
      }
      if (!bounds.valid()) {
        std::cerr << "heatmap: store has no map-frame geometry; pass --map\n";
        return 1;
      }
      geom.resolution = resolution;
      geom.origin_x = bounds.lo.x - 1.0;
      geom.origin_y = bounds.lo.y - 1.0;
      geom.width = std::max(1, static_cast<int>((bounds.hi.x - bounds.lo.x + 2.0) / resolution));
      geom.height = std::max(1, static_cast<int>((bounds.hi.y - bounds.lo.y + 2.0) / resolution));
    }
    const hiper::interp::HeatmapParams params;
    const auto map =
        hiper::interp::generate_heatmap(store, class_label, t_from, t_to, geom, invert, params);
    hiper::interp::save_heatmap(map, out_path);
    const double peak = *std::max_element(map.grid.cells.begin(), map.grid.cells.end());
    std::cout << "wrote " << out_path << " (" << geom.width << "x" << geom.height
              << " cells, peak " << peak << ")\n";
  } catch (const std::exception& e) {
    std::cerr << "heatmap: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
