#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hiper/bench/pipeline.hpp"
#include "hiper/bench/planner.hpp"
#include "hiper/bench/scenario.hpp"
#include "hiper/core/rng.hpp"
#include "oracles.hpp"

using namespace hiper;
using namespace hiper::bench;

TEST_CASE("ablation table wiring matches the nested design") {
  const auto c1 = AblationConfig::by_id("C1");
  CHECK(c1.foreground_recognition);
  CHECK(c1.background_recognition);
  CHECK(c1.knowledge_base == AblationConfig::KbMode::full);
  CHECK(c1.heatmaps);
  CHECK(c1.feature_learning);

  const auto c3 = AblationConfig::by_id("C3");
  CHECK(c3.knowledge_base == AblationConfig::KbMode::mot_only);
  CHECK_FALSE(c3.heatmaps);

  const auto c5 = AblationConfig::by_id("C5");
  CHECK_FALSE(c5.foreground_recognition);
  CHECK(c5.knowledge_base == AblationConfig::KbMode::off);

  CHECK_THROWS_AS(AblationConfig::by_id("C9"), std::invalid_argument);

  // Monotone wiring: each Ck enables a strict superset of Ck+1.
  const auto all = AblationConfig::all();
  for (size_t i = 0; i + 1 < all.size(); ++i) {
    const unsigned stronger = all[i].feature_bits();
    const unsigned weaker = all[i + 1].feature_bits();
    CHECK((stronger & weaker) == weaker);
    CHECK(stronger != weaker);
  }
}

namespace {

Costmap random_costmap(uint64_t seed, int w, int h, double wall_fraction) {
  GridGeometry geom;
  geom.origin_x = 0;
  geom.origin_y = 0;
  geom.resolution = 0.1;
  geom.width = w;
  geom.height = h;
  Costmap map(geom, 0.0f);
  Rng rng(seed);
  for (auto& cell : map.cells) {
    const double r = rng.uniform();
    if (r < wall_fraction) {
      cell = kLethalCost;
    } else if (r < wall_fraction + 0.2) {
      cell = static_cast<float>(rng.uniform(0, 200));
    }
  }
  return map;
}

}  // namespace

TEST_CASE("straight free corridor gives a straight path") {
  GridGeometry geom;
  geom.origin_x = 0;
  geom.origin_y = 0;
  geom.resolution = 0.1;
  geom.width = 60;
  geom.height = 5;
  Costmap map(geom, 0.0f);
  const auto path = plan_path(map, {0.15, 0.25}, {5.85, 0.25});
  REQUIRE(path.has_value());
  CHECK(path->cost == doctest::Approx(5.7).epsilon(0.01));
  for (const auto& p : path->waypoints) CHECK(p.y == doctest::Approx(0.25));
}

TEST_CASE("blocked corridor forces a detour; full wall gives no path") {
  GridGeometry geom;
  geom.origin_x = 0;
  geom.origin_y = 0;
  geom.resolution = 0.1;
  geom.width = 40;
  geom.height = 20;
  Costmap map(geom, 0.0f);
  for (int iy = 0; iy < 15; ++iy) map.at(20, iy) = kLethalCost;
  const auto detour = plan_path(map, {0.55, 0.55}, {3.45, 0.55});
  REQUIRE(detour.has_value());
  CHECK(detour->cost > 3.2);  // longer than the straight line

  for (int iy = 0; iy < 20; ++iy) map.at(20, iy) = kLethalCost;
  CHECK_FALSE(plan_path(map, {0.55, 0.55}, {3.45, 0.55}).has_value());
}

TEST_CASE("A* cost equals Dijkstra oracle on random maps up to 50x50") {
  Rng rng(321);
  int compared = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int w = 20 + static_cast<int>(rng.uniform(0, 30));
    const int h = 20 + static_cast<int>(rng.uniform(0, 30));
    Costmap map = random_costmap(1000 + trial, w, h, 0.2);
    const int sx = 1, sy = 1, gx = w - 2, gy = h - 2;
    map.at(sx, sy) = 0;
    map.at(gx, gy) = 0;
    const double oracle = oracles::dijkstra_cost(map, sx, sy, gx, gy, 1.0 / 64.0);
    const auto got = plan_path(map, {map.geom.center_x(sx), map.geom.center_y(sy)},
                               {map.geom.center_x(gx), map.geom.center_y(gy)});
    if (oracle >= 1e30) {
      CHECK_FALSE(got.has_value());
    } else {
      REQUIRE(got.has_value());
      CHECK(got->cost == doctest::Approx(oracle).epsilon(1e-9));
      ++compared;
    }
  }
  CHECK(compared > 10);
}

TEST_CASE("costmap from world blocks walls and props, keeps floor free") {
  const auto world = sim::load_world(WORLDS_DIR "/house.json");
  const auto map = build_costmap(world, 0.1, 0.3);
  // Center of the room is free.
  CHECK(map.at(map.geom.cell_x(0.0), map.geom.cell_y(0.0)) < kLethalCost);
  // Wall line is lethal.
  CHECK(map.at(map.geom.cell_x(4.45), map.geom.cell_y(0.0)) == kLethalCost);
  // Table footprint is lethal.
  CHECK(map.at(map.geom.cell_x(3.2), map.geom.cell_y(2.4)) == kLethalCost);
}

TEST_CASE("coverage waypoints lie in free space and sweep north first") {
  const auto world = sim::load_world(WORLDS_DIR "/hospital.json");
  const auto map = build_costmap(world, 0.1, 0.3);
  const auto lanes = coverage_waypoints(map, 1.5);
  REQUIRE(lanes.size() > 4);
  CHECK(lanes.front().y > 0);  // starts in the northern half
  for (const auto& p : lanes) {
    const int ix = map.geom.cell_x(p.x);
    const int iy = map.geom.cell_y(p.y);
    REQUIRE(map.geom.contains(ix, iy));
    CHECK(map.at(ix, iy) < kLethalCost);
  }
}

TEST_CASE("run seeds are deterministic and distinct per cell") {
  const uint64_t a = run_seed("house", "C1", "T1", 0);
  CHECK(a == run_seed("house", "C1", "T1", 0));
  CHECK(a != run_seed("house", "C1", "T1", 1));
  CHECK(a != run_seed("house", "C2", "T1", 0));
  CHECK(a != run_seed("house", "C1", "T2", 0));
  CHECK(a != run_seed("hospital", "C1", "T1", 0));
}

TEST_CASE("report aggregation is exact over its rows") {
  ScenarioReport report;
  const auto add = [&](const std::string& cfg, const std::string& task, double secs, bool ok) {
    TaskResult row;
    row.world = "house";
    row.config = cfg;
    row.task = task;
    row.seconds = secs;
    row.success = ok;
    report.rows.push_back(row);
  };
  add("C1", "T1", 10, true);
  add("C1", "T1", 20, true);
  add("C1", "T1", 30, false);
  add("C1", "T2", 40, true);

  const auto cell = report.cell("C1", "T1");
  CHECK(cell.runs == 3);
  CHECK(cell.mean_seconds == doctest::Approx(20.0));
  CHECK(cell.std_seconds == doctest::Approx(10.0));
  CHECK(cell.success_rate == doctest::Approx(2.0 / 3.0));
  CHECK(report.scenario_seconds("C1") == doctest::Approx(20.0 + 40.0));

  const std::string csv = report.to_csv();
  CHECK(csv.find("world,config,task,run,seconds,success,reason") == 0);
  CHECK(csv.find("house,C1,T1,0,10,1,") != std::string::npos);
}

TEST_CASE("mapping populates the store and reruns identically per seed") {
  auto world = sim::load_world(WORLDS_DIR "/desk.json");
  BenchSetup setup = BenchSetup::for_world(world);

  kb::KnowledgeBase kb1;
  const auto r1 = initial_mapping(setup, kb1);
  CHECK(r1.instances >= 2);  // at least the synthetic floor/ceiling
  CHECK(r1.precision_static == doctest::Approx(1.0));

  kb::KnowledgeBase kb2;
  initial_mapping(setup, kb2);
  REQUIRE(kb1.size() == kb2.size());
  for (size_t i = 0; i < kb1.documents().size(); ++i) {
    CHECK(kb::document_to_record(kb1.documents()[i]) ==
          kb::document_to_record(kb2.documents()[i]));
  }
}
