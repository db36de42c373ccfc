#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "crossflow/sim.hpp"

using namespace crossflow;
using namespace crossflow::sim;
using enum Movement;

namespace {

SimConfig config_for(ControllerKind kind, double demand, std::uint64_t seed = 1) {
  SimConfig c;
  c.controller.kind = kind;
  c.demand_veh_per_hour_per_lane = demand;
  c.seed = seed;
  return c;
}

/// Departures of a single green for a given queue, step by step.
int discharge_total(int queue, int green_s, const DischargeParams& p) {
  Discharge d;
  int total = 0;
  for (int t = 0; t < green_s; ++t) {
    const int n = d.step(queue - total, true, t, 1.0, p);
    total += n;
  }
  return total;
}

}  // namespace

TEST_CASE("arrival streams") {
  ArrivalStream zero(1, 1);
  for (int i = 0; i < 1000; ++i) CHECK(spawn_arrivals(zero, 0.0, 1.0) == 0);

  ArrivalStream a(42, 4), b(42, 4), other_lane(42, 5);
  bool differs = false;
  for (int i = 0; i < 3600; ++i) {
    const int x = a.draw(0.2, 1.0);
    CHECK(x == b.draw(0.2, 1.0));
    differs = differs || x != other_lane.draw(0.2, 1.0);
  }
  CHECK(differs);
}

TEST_CASE("hourly arrival counts average the configured rate") {
  long total = 0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    ArrivalStream s(static_cast<std::uint64_t>(r), 1);
    for (int t = 0; t < 3600; ++t) total += s.draw(250.0 / 3600.0, 1.0);
  }
  const double mean = static_cast<double>(total) / reps;
  CHECK(mean == doctest::Approx(250.0).epsilon(0.05));
}

TEST_CASE("saturation discharge") {
  const DischargeParams p{2.0, 2.0};
  Discharge red;
  CHECK(red.step(10, false, 0, 1.0, p) == 0);
  CHECK(discharge_total(10, 22, p) == 10);
  CHECK(discharge_total(10, 21, p) == 10);
  CHECK(discharge_total(10, 20, p) == 9);
  CHECK(discharge_total(3, 60, p) == 3);
  // Head vehicle crosses the moment the lost time ends.
  Discharge d;
  CHECK(d.step(5, true, 0, 1.0, p) == 0);
  CHECK(d.step(5, true, 1, 1.0, p) == 0);
  CHECK(d.step(5, true, 2, 1.0, p) == 1);
  CHECK(d.step(4, true, 3, 1.0, p) == 0);
  CHECK(d.step(4, true, 4, 1.0, p) == 1);
}

TEST_CASE("discharge matches the headway schedule for arbitrary greens") {
  // Vehicle k crosses at lost + k * headway.
  for (double headway : {1.0, 1.5, 2.0, 2.5}) {
    for (int green = 0; green < 80; ++green) {
      for (int queue : {0, 1, 7, 40}) {
        const DischargeParams p{headway, 2.0};
        int expected = 0;
        while (expected < queue && 2.0 + expected * headway <= green - 1 + 1e-9) ++expected;
        CHECK(discharge_total(queue, green, p) == expected);
      }
    }
  }
}

TEST_CASE("empty intersection") {
  for (auto kind : {ControllerKind::BM1, ControllerKind::BM2, ControllerKind::DT3P}) {
    const MetricsRecord m = run(config_for(kind, 0));
    CHECK(m.departure_arrival_pct == 100.0);
    CHECK(m.avg_queue_veh == 0.0);
    CHECK(m.max_queue_veh == 0.0);
    CHECK(m.avg_wait_s == 0.0);
    CHECK(m.max_wait_s == 0.0);
    CHECK(m.green_time_utilization == 0.0);
    CHECK(m.stability == 1);
  }
}

TEST_CASE("a lone vehicle under fixed time waits for its next green plus lost time") {
  // E is green from 60 s; A's next green after its first phase starts at 120 s.
  struct Case {
    Movement movement;
    int inject_at;
    double expected_wait;
  };
  for (const Case& k : {Case{E, 0, 62}, Case{A, 30, 92}, Case{A, 5, 0}, Case{H, 120, 92}}) {
    SimConfig c = config_for(ControllerKind::BM1, 0);
    c.duration_s = 400;
    Simulation s(c, make_controller(c.controller, c.full_cycle_s));
    for (int t = 0; t < k.inject_at; ++t) s.step();
    s.inject_vehicle(k.movement);
    const RunResult r = s.finish();
    CHECK(r.diagnostics.total_departures == 1);
    CHECK(r.metrics.max_wait_s == k.expected_wait);
    CHECK(r.metrics.max_wait_s <= 92);
  }
}

TEST_CASE("same seed, same metrics") {
  for (auto kind : {ControllerKind::BM1, ControllerKind::BM2, ControllerKind::DT3P}) {
    const SimConfig c = config_for(kind, 750, 99);
    CHECK(run(c) == run(c));
    CHECK_FALSE(run(c) == run(config_for(kind, 750, 100)));
  }
}

TEST_CASE("conservation, safety and detection hold at every step") {
  for (auto kind : {ControllerKind::BM1, ControllerKind::BM2, ControllerKind::DT3P}) {
    for (double demand : {250.0, 1300.0}) {
      SimConfig c = config_for(kind, demand, 5);
      c.duration_s = 1800;
      Simulation s(c, make_controller(c.controller, c.full_cycle_s));
      while (!s.done()) {
        s.step();
        for (Movement m : kAllMovements) {
          const int lane = lane_index(m);
          REQUIRE(s.cumulative_arrivals(lane) ==
                  s.cumulative_departures(lane) + s.true_queue(lane));
          const LaneState view = s.collector().detected_snapshot(s.clock_s())[lane];
          REQUIRE(view.detected_queue_veh == std::min(s.true_queue(lane), 75));
        }
        const MovementPair g = s.current_plan().greens();
        REQUIRE_FALSE(conflicts_with(g.first(), g.second()));
      }
      const RunResult r = s.finish();
      CHECK(r.diagnostics.conservation_violations == 0);
      CHECK(r.diagnostics.conflict_violations == 0);
      CHECK(r.diagnostics.detection_violations == 0);
      CHECK(r.diagnostics.total_arrivals ==
            r.diagnostics.total_departures +
                static_cast<long>(r.total_queue.back()));
    }
  }
}

TEST_CASE("metric bounds") {
  for (auto kind : {ControllerKind::BM1, ControllerKind::BM2, ControllerKind::DT3P}) {
    for (double demand : {250.0, 375.0, 750.0, 1125.0, 1300.0}) {
      const MetricsRecord m = run(config_for(kind, demand, 3));
      CHECK(m.departure_arrival_pct >= 0.0);
      CHECK(m.departure_arrival_pct <= 100.0);
      CHECK(m.max_queue_veh >= m.avg_queue_veh);
      CHECK(m.max_wait_s >= m.avg_wait_s);
      CHECK(m.green_time_utilization >= 0.0);
      CHECK(m.green_time_utilization <= 1.0);
    }
  }
}

TEST_CASE("dynamic controller serves light demand") {
  double pct = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    pct += run(config_for(ControllerKind::DT3P, 250, seed)).departure_arrival_pct;
  }
  CHECK(pct / 5 >= 95.0);
}

TEST_CASE("fixed-time utilization rises with demand") {
  double low = 0, medium = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    low += run(config_for(ControllerKind::BM1, 250, seed)).green_time_utilization;
    medium += run(config_for(ControllerKind::BM1, 750, seed)).green_time_utilization;
  }
  CHECK(low < medium);
}

TEST_CASE("config validation") {
  SimConfig c;
  CHECK_NOTHROW(c.validate());
  c.duration_s = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.demand_veh_per_hour_per_lane = -5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.saturation_headway_s = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.controller.weights.occupancy = 0.9;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(run(c), ConfigError);
}

TEST_CASE("detection trace has one row per signalized lane per step") {
  std::ostringstream trace;
  SimConfig c = config_for(ControllerKind::DT3P, 500);
  c.duration_s = 10;
  RunOptions o;
  o.detection_trace = &trace;
  simulate(c, o);
  const std::string text = trace.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 10 * 8);
}
