// Runs the deterministic world simulator and dumps one frame record per
// line, plus the world's ground-truth poses when asked.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hiper/bench/planner.hpp"
#include "hiper/sim/frame_io.hpp"
#include "hiper/sim/simulator.hpp"

int main(int argc, char** argv) {
  CLI::App app{"deterministic scene simulator"};
  std::string world_path;
  uint64_t seed = 0;
  bool seed_set = false;
  double duration = 10.0;
  std::string out_dir = "sim-out";
  bool with_agents = true;
  app.add_option("--world", world_path, "world spec file")->required();
  auto* seed_opt = app.add_option("--seed", seed, "override the world seed");
  app.add_option("--duration", duration, "simulated seconds");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--no-agents,!--agents", with_agents, "spawn dynamic agents");
  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

  try {
    hiper::sim::WorldSpec world = hiper::sim::load_world(world_path);
    if (seed_set) world.seed = seed;
    hiper::sim::SimConfig cfg;
    hiper::sim::Simulator sim(world, cfg);
    if (with_agents) sim.spawn_agents();

    // Patrol the free space so the dump sweeps the scene.
    const auto costmap = hiper::bench::build_costmap(world, 0.1, 0.3);
    auto lanes = hiper::bench::coverage_waypoints(costmap, 1.5);
    sim.set_path(lanes);
    sim.set_speed(0.6);

    std::filesystem::create_directories(out_dir);
    std::ofstream frames_out(out_dir + "/frames.ndjson");
    std::ofstream truth_out(out_dir + "/truth.ndjson");

    const double dt = 0.1;
    int frames = 0;
    while (sim.time() < duration) {
      if (sim.path_done()) sim.set_path(lanes);
      sim.step(dt);
      const auto frame = sim.render_frame();
      frames_out << hiper::sim::frame_to_record(frame) << "\n";
      truth_out << "{\"t\":" << frame.t << ",\"agents\":[";
      const auto agents = sim.agent_positions();
      for (size_t i = 0; i < agents.size(); ++i)
        truth_out << (i ? "," : "") << "[" << agents[i].x << "," << agents[i].y << "]";
      truth_out << "]}\n";
      ++frames;
    }
    std::cout << "wrote " << frames << " frames to " << out_dir << "/frames.ndjson\n";
  } catch (const std::exception& e) {
    std::cerr << "sim: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
