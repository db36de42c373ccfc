// Discrete-time point-queue simulator of the four-leg intersection.
#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossflow/controller.hpp"
#include "crossflow/domain.hpp"
#include "crossflow/rsdc.hpp"

namespace crossflow::sim {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SimConfig {
  int duration_s = 3600;
  double step_s = 1.0;
  double demand_veh_per_hour_per_lane = 250.0;
  std::uint64_t seed = 1;
  double saturation_headway_s = 2.0;
  double startup_lost_time_s = 2.0;
  double full_cycle_s = dt3p::kDefaultFullCycleS;
  double min_green_s = dt3p::kDefaultMinGreenS;
  ControllerSpec controller{};

  /// Throws ConfigError on the first invalid field.
  void validate() const;
};

/// The seven evaluation factors of one run (or of a replication mean).
struct MetricsRecord {
  double departure_arrival_pct = 100.0;
  double avg_queue_veh = 0.0;
  double max_queue_veh = 0.0;
  double avg_wait_s = 0.0;
  double max_wait_s = 0.0;
  double green_time_utilization = 0.0;
  int stability = 1;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

/// Per-lane arrival stream, seeded from (seed, lane) only.
class ArrivalStream {
 public:
  ArrivalStream(std::uint64_t seed, int lane);
  /// Poisson count with mean rate * step, by CDF inversion so the sequence
  /// is identical on every platform.
  int draw(double rate_veh_per_s, double step_s);

 private:
  std::mt19937_64 engine_;
};

int spawn_arrivals(ArrivalStream& rng, double rate_veh_per_s, double step_s);

struct DischargeParams {
  double saturation_headway_s = 2.0;
  double startup_lost_time_s = 2.0;
};

/// Saturation-flow discharge. Credit accrues at step/headway per green step
/// once the lost time has passed; it is primed so the head vehicle crosses as
/// soon as the lost time ends, and never banks more than one vehicle.
class Discharge {
 public:
  int step(int queue, bool is_green, double time_into_green_s, double step_s,
           const DischargeParams& params);

 private:
  double credit_ = 0.0;
};

struct RunDiagnostics {
  long steps = 0;
  long decisions = 0;
  long conservation_violations = 0;
  long conflict_violations = 0;
  long detection_violations = 0;
  long total_arrivals = 0;
  long total_departures = 0;
};

struct RunResult {
  MetricsRecord metrics;
  RunDiagnostics diagnostics;
  std::vector<double> total_queue;  // summed true queue after every step
  std::vector<PhasePlan> plans;     // every plan put into effect, in order
};

struct RunOptions {
  std::ostream* detection_trace = nullptr;
  bool keep_plans = false;
};

/// One replication. Owns its controller, detectors and arrival streams.
class Simulation {
 public:
  Simulation(SimConfig config, std::unique_ptr<Controller> controller,
             RunOptions options = {});

  /// Advance one step: arrivals, discharge, phase switching, metrics.
  void step();
  bool done() const { return step_index_ >= total_steps_; }
  /// Adds one vehicle to the back of `m`'s queue at the current clock, on top
  /// of the random arrivals.
  void inject_vehicle(Movement m);
  RunResult finish();

  double clock_s() const { return static_cast<double>(step_index_) * config_.step_s; }
  const PhasePlan& current_plan() const { return plan_; }
  double phase_start_s() const { return phase_start_s_; }
  const rsdc::Collector& collector() const { return collector_; }
  int true_queue(int lane) const;
  long cumulative_arrivals(int lane) const;
  long cumulative_departures(int lane) const;
  rsdc::Collector& mutable_collector() { return collector_; }

 private:
  struct Lane {
    std::deque<double> arrival_times;
    ArrivalStream arrivals;
    Discharge discharge;
    long arrived = 0;
    long departed = 0;
    double green_since_s = 0.0;
    double green_seconds = 0.0;
    double used_green_seconds = 0.0;
  };

  bool is_green_(Movement m) const { return plan_.greens().contains(m); }
  void switch_plan_(const PhasePlan& next, double t_s);
  void check_invariants_();

  SimConfig config_;
  std::unique_ptr<Controller> controller_;
  RunOptions options_;
  rsdc::Collector collector_;
  std::vector<Lane> lanes_;  // one per movement
  PhasePlan plan_;
  double phase_start_s_ = 0.0;
  double last_actuation_s_ = 0.0;
  long step_index_ = 0;
  long total_steps_ = 0;

  RunResult result_;
  double queue_sum_ = 0.0;
  double wait_sum_ = 0.0;
};

/// Simulate one replication with the controller named in the config.
RunResult simulate(const SimConfig& config, RunOptions options = {});
/// Same, with a caller-supplied controller.
RunResult simulate(const SimConfig& config, std::unique_ptr<Controller> controller,
                   RunOptions options = {});

MetricsRecord run(const SimConfig& config);

}  // namespace crossflow::sim
