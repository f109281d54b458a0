// Benchmark harness: initial mapping, long-term operation, seeded task
// runs over the ablation configurations, and report aggregation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hiper/bench/scenario.hpp"
#include "hiper/interp/heatmap.hpp"

namespace fs = std::filesystem;
using namespace hiper;

namespace {

bench::BenchSetup make_setup(const std::string& world_path, const std::string& config_path) {
  const sim::WorldSpec world = sim::load_world(world_path);
  Config cfg;
  if (!config_path.empty()) cfg = Config::from_file(config_path);
  return bench::BenchSetup::for_world(world, cfg);
}

std::map<std::string, interp::Heatmap> load_heatmaps(const std::string& dir,
                                                     const std::string& config_id) {
  std::map<std::string, interp::Heatmap> out;
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    const std::string prefix = "heatmap-" + config_id + "-";
    if (name.rfind(prefix, 0) == 0 && entry.path().extension() == ".pgm") {
      const auto map = interp::load_heatmap(entry.path().string());
      out.emplace(map.class_label, map);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scene-perception benchmark"};
  app.require_subcommand(1);

  std::string world_path, config_path, out_dir = "bench-out", config_id = "C1", task = "T1";
  std::string csv_out;
  int n = 10;
  double minutes = 20.0;
  uint64_t seed_base = 0;

  auto* map_cmd = app.add_subcommand("map", "initial mapping sweep");
  map_cmd->add_option("--world", world_path)->required();
  map_cmd->add_option("--config", config_path, "ini config file");
  map_cmd->add_option("--out", out_dir);

  auto* long_cmd = app.add_subcommand("longterm", "long-term operation phase");
  long_cmd->add_option("--world", world_path)->required();
  long_cmd->add_option("--minutes", minutes);
  long_cmd->add_option("--config-id", config_id, "ablation config C1..C5");
  long_cmd->add_option("--config", config_path, "ini config file");
  long_cmd->add_option("--out", out_dir);

  auto* run_cmd = app.add_subcommand("run", "seeded task runs");
  run_cmd->add_option("--world", world_path)->required();
  run_cmd->add_option("--task", task, "T1 | T2 | T4");
  run_cmd->add_option("--config-id", config_id, "ablation config C1..C5");
  run_cmd->add_option("--config", config_path, "ini config file");
  run_cmd->add_option("--n", n, "runs per cell");
  run_cmd->add_option("--seed", seed_base, "extra seed salt");
  run_cmd->add_option("--out", out_dir);

  auto* report_cmd = app.add_subcommand("report", "aggregate results.csv");
  report_cmd->add_option("--dir", out_dir);
  report_cmd->add_option("--out", csv_out, "write aggregated csv here");

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);
    if (map_cmd->parsed()) {
      const auto setup = make_setup(world_path, config_path);
      kb::KnowledgeBase store;
      Costmap costmap;
      const auto result = bench::initial_mapping(setup, store, &costmap);
      store.save(out_dir + "/mapping.kb");
      interp::save_costmap(costmap, out_dir + "/costmap.pgm");
      std::cout << "mapping: " << result.frames << " frames, " << result.sim_seconds
                << " s simulated, " << result.instances << " instances, "
                << result.observations << " observations, static precision "
                << 100.0 * result.precision_static << "%\n";
    } else if (long_cmd->parsed()) {
      const auto setup = make_setup(world_path, config_path);
      const auto config = bench::AblationConfig::by_id(config_id);
      auto store = kb::KnowledgeBase::load(out_dir + "/mapping.kb");
      const auto result = bench::run_longterm(setup, config, minutes, store);
      store.save(out_dir + "/longterm-" + config_id + ".kb");
      if (config.heatmaps) {
        const auto costmap = interp::load_costmap(out_dir + "/costmap.pgm");
        const auto heatmaps = bench::generate_class_heatmaps(
            store, costmap.geom, 0.0, result.sim_seconds + 1.0, setup.pipeline.heatmap);
        for (const auto& [class_label, map] : heatmaps)
          interp::save_heatmap(map, out_dir + "/heatmap-" + config_id + "-" + class_label + ".pgm");
        std::cout << "heatmaps: " << heatmaps.size() << " classes\n";
      }
      std::cout << "longterm: " << result.frames << " frames, fitted "
                << result.fitted_classes.size() << " classes\n";
    } else if (run_cmd->parsed()) {
      const auto setup = make_setup(world_path, config_path);
      const auto config = bench::AblationConfig::by_id(config_id);
      const std::string kb_path = (config.heatmaps || config.feature_learning)
                                      ? out_dir + "/longterm-" + config_id + ".kb"
                                      : out_dir + "/mapping.kb";
      kb::KnowledgeBase store;
      if (config.knowledge_base != bench::AblationConfig::KbMode::off)
        store = kb::KnowledgeBase::load(kb_path);
      const auto heatmaps = load_heatmaps(out_dir, config_id);

      const std::string csv_path = out_dir + "/results.csv";
      const bool fresh = !fs::exists(csv_path);
      std::ofstream csv(csv_path, std::ios::app);
      if (fresh) csv << "world,config,task,run,seconds,success,reason\n";
      for (int run = 0; run < n; ++run) {
        const uint64_t seed =
            bench::run_seed(setup.world.name, config_id, task, run) ^ seed_base;
        auto row = bench::run_task(setup, task, config, seed, store, heatmaps);
        row.run = run;
        csv << row.world << "," << row.config << "," << row.task << "," << row.run << ","
            << row.seconds << "," << (row.success ? 1 : 0) << "," << row.reason << "\n";
        std::cout << row.config << " " << row.task << " run " << row.run << ": "
                  << (row.success ? "ok" : row.reason) << " in " << row.seconds << " s\n";
      }
    } else if (report_cmd->parsed()) {
      std::ifstream csv(out_dir + "/results.csv");
      if (!csv) throw std::invalid_argument("no results.csv under " + out_dir);
      bench::ScenarioReport report;
      std::string line;
      std::getline(csv, line);  // header
      while (std::getline(csv, line)) {
        std::stringstream ss(line);
        bench::TaskResult row;
        std::string field;
        std::getline(ss, row.world, ',');
        std::getline(ss, row.config, ',');
        std::getline(ss, row.task, ',');
        std::getline(ss, field, ',');
        row.run = std::stoi(field);
        std::getline(ss, field, ',');
        row.seconds = std::stod(field);
        std::getline(ss, field, ',');
        row.success = field == "1";
        std::getline(ss, row.reason, ',');
        report.rows.push_back(row);
      }
      std::cout << report.format_table();
      if (!csv_out.empty()) {
        std::ofstream out(csv_out);
        out << report.to_csv();
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
