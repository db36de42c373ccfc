#include <doctest.h>

#include "crossflow/config.hpp"

using namespace crossflow;
using nlohmann::json;

TEST_CASE("minimal config takes every default") {
  const GridConfigFile f = parse_grid_config(json::parse(R"({"controllers": ["bm1", "dt3p"]})"));
  const auto& g = f.grid;
  REQUIRE(g.controllers.size() == 2);
  CHECK(g.controllers[0].kind == ControllerKind::BM1);
  CHECK(g.controllers[1].kind == ControllerKind::DT3P);
  CHECK(g.demand_levels.size() == 5);
  CHECK_FALSE(g.replications.paper);
  CHECK(g.replications.fixed == 20);
  CHECK(g.sim.duration_s == 3600);
  CHECK(g.sim.full_cycle_s == 120.0);
  CHECK_FALSE(f.output_dir.has_value());
}

TEST_CASE("full config") {
  const json j = json::parse(R"({
    "controllers": ["bm1", {"name": "BM2", "bm2": {"max_green_s": 45}}, "dt3p"],
    "demand_levels": ["very-small", {"name": "custom", "rate": 500}],
    "duration_s": 900,
    "seed_base": 1000,
    "replications": "paper",
    "output_dir": "out",
    "load_weights": {"occupancy": 0.5, "wait": 0.2},
    "bm1_durations_s": [40, 20, 40, 20],
    "sim": {"saturation_headway_s": 1.8, "min_green_s": 7}
  })");
  const GridConfigFile f = parse_grid_config(j);
  const auto& g = f.grid;
  CHECK(g.controllers[1].kind == ControllerKind::BM2);
  CHECK(g.controllers[1].actuated.max_green_s == 45.0);
  CHECK(g.controllers[0].actuated.max_green_s == 60.0);
  CHECK(g.controllers[2].weights.occupancy == 0.5);
  CHECK(g.controllers[0].fixed_plan.phase_durations_s[1] == 20.0);
  REQUIRE(g.demand_levels.size() == 2);
  CHECK(g.demand_levels[1].rate_veh_per_hour_per_lane == 500.0);
  CHECK(g.replications.paper);
  CHECK(g.replications.count(g.demand_levels[0]) == 152);
  CHECK(g.seed_base == 1000);
  CHECK(g.sim.duration_s == 900);
  CHECK(g.sim.saturation_headway_s == 1.8);
  CHECK(g.sim.min_green_s == 7.0);
  CHECK(f.output_dir == "out");
}

TEST_CASE("resolved config re-parses to the same resolved config") {
  const json j = json::parse(R"({
    "controllers": ["bm1", {"name": "bm2", "bm2": {"extension_s": 4}}],
    "demand_levels": ["small", "large"], "replications": {"fixed": 3}, "seed_base": 9
  })");
  const auto first = parse_grid_config(j);
  const auto resolved = config_to_json(first.grid);
  const auto second = parse_grid_config(json::parse(resolved.dump()));
  CHECK(config_to_json(second.grid).dump() == resolved.dump());
}

TEST_CASE("malformed configs") {
  auto bad = [](const char* text) {
    INFO(std::string(text));
    CHECK_THROWS_AS(parse_grid_config(json::parse(text)), sim::ConfigError);
  };
  bad(R"([])");
  bad(R"({})");
  bad(R"({"controllers": []})");
  bad(R"({"controllers": ["nm1"]})");
  bad(R"({"controllers": [42]})");
  bad(R"({"controllers": ["bm1"], "demand_levels": ["enormous"]})");
  bad(R"({"controllers": ["bm1"], "replications": "lots"})");
  bad(R"({"controllers": ["bm1"], "replications": 0})");
  bad(R"({"controllers": ["bm1"], "duration_s": "long"})");
  bad(R"({"controllers": ["bm1"], "bm1_durations_s": [30, 30]})");
  bad(R"({"controllers": ["dt3p"], "load_weights": {"occupancy": 0.9}})");
  bad(R"({"controllers": ["bm2"], "bm2": {"min_green_s": 90}})");
  CHECK_THROWS_AS(load_grid_config("/nonexistent/grid.json"), sim::ConfigError);
}

TEST_CASE("single-run overrides") {
  sim::SimConfig c;
  apply_run_overrides(json::parse(R"({"sim": {"startup_lost_time_s": 3},
                                      "bm2": {"extension_s": 2.5}})"),
                      c);
  CHECK(c.startup_lost_time_s == 3.0);
  CHECK(c.controller.actuated.extension_s == 2.5);
}
