#include "crossflow/sim.hpp"

#include <algorithm>
#include <cmath>

#include "crossflow/stability.hpp"

namespace crossflow::sim {

void SimConfig::validate() const {
  if (duration_s <= 0) throw ConfigError("duration must be positive");
  if (!(step_s > 0.0)) throw ConfigError("step must be positive");
  if (!(demand_veh_per_hour_per_lane >= 0.0) || !std::isfinite(demand_veh_per_hour_per_lane)) {
    throw ConfigError("demand must be a finite non-negative rate");
  }
  if (!(saturation_headway_s > 0.0)) throw ConfigError("saturation headway must be positive");
  if (!(startup_lost_time_s >= 0.0)) throw ConfigError("startup lost time must be >= 0");
  if (!(full_cycle_s > 0.0)) throw ConfigError("full cycle must be positive");
  if (!(min_green_s > 0.0) || min_green_s > full_cycle_s) {
    throw ConfigError("min green must lie in (0, full cycle]");
  }
  try {
    controller.weights.validate();
    controller.fixed_plan.validate();
    controller.actuated.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ArrivalStream::ArrivalStream(std::uint64_t seed, int lane) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(lane)};
  engine_.seed(seq);
}

int ArrivalStream::draw(double rate_veh_per_s, double step_s) {
  const double mean = rate_veh_per_s * step_s;
  if (mean <= 0.0) return 0;
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  double p = std::exp(-mean);
  double cdf = p;
  int k = 0;
  while (u >= cdf && p > 0.0) {
    ++k;
    p *= mean / k;
    cdf += p;
  }
  return k;
}

int spawn_arrivals(ArrivalStream& rng, double rate_veh_per_s, double step_s) {
  return rng.draw(rate_veh_per_s, step_s);
}

int Discharge::step(int queue, bool is_green, double time_into_green_s, double step_s,
                    const DischargeParams& params) {
  const double per_step = step_s / params.saturation_headway_s;
  if (!is_green || time_into_green_s < params.startup_lost_time_s) {
    credit_ = 1.0 - per_step;
    return 0;
  }
  credit_ += per_step;
  const int departures = std::min(static_cast<int>(std::floor(credit_ + 1e-9)), queue);
  credit_ = std::min(credit_ - departures, 1.0);
  return departures;
}

Simulation::Simulation(SimConfig config, std::unique_ptr<Controller> controller,
                       RunOptions options)
    : config_(std::move(config)),
      controller_(std::move(controller)),
      options_(options),
      plan_((config_.validate(), controller_->initial_plan())) {
  lanes_.reserve(kMovementCount);
  for (Movement m : kAllMovements) {
    lanes_.push_back(Lane{{}, ArrivalStream(config_.seed, lane_index(m)), {}});
  }
  total_steps_ = static_cast<long>(std::llround(config_.duration_s / config_.step_s));
  result_.total_queue.reserve(static_cast<std::size_t>(total_steps_));
  if (options_.keep_plans) result_.plans.push_back(plan_);
  if (options_.detection_trace) rsdc::Collector::write_trace_header(*options_.detection_trace);
}

int Simulation::true_queue(int lane) const {
  const auto m = movement_for_lane(lane);
  return m ? static_cast<int>(lanes_[static_cast<std::size_t>(index_of(*m))].arrival_times.size())
           : 0;
}

long Simulation::cumulative_arrivals(int lane) const {
  const auto m = movement_for_lane(lane);
  return m ? lanes_[static_cast<std::size_t>(index_of(*m))].arrived : 0;
}

long Simulation::cumulative_departures(int lane) const {
  const auto m = movement_for_lane(lane);
  return m ? lanes_[static_cast<std::size_t>(index_of(*m))].departed : 0;
}

void Simulation::inject_vehicle(Movement m) {
  Lane& lane = lanes_[static_cast<std::size_t>(index_of(m))];
  lane.arrival_times.push_back(clock_s());
  ++lane.arrived;
  collector_.on_arrival_belt(lane_index(m), clock_s());
}

void Simulation::switch_plan_(const PhasePlan& next, double t_s) {
  for (Movement m : kAllMovements) {
    if (next.greens().contains(m) && !is_green_(m)) {
      lanes_[static_cast<std::size_t>(index_of(m))].green_since_s = t_s;
    }
  }
  plan_ = next;
  phase_start_s_ = t_s;
  last_actuation_s_ = t_s;
  if (options_.keep_plans) result_.plans.push_back(plan_);
}

void Simulation::check_invariants_() {
  auto& diag = result_.diagnostics;
  if (SigGraph::standard().conflicts_with(plan_.greens().first(), plan_.greens().second())) {
    ++diag.conflict_violations;
  }
  for (Movement m : kAllMovements) {
    const Lane& lane = lanes_[static_cast<std::size_t>(index_of(m))];
    const int lane_no = lane_index(m);
    const long queue = static_cast<long>(lane.arrival_times.size());
    if (lane.arrived != lane.departed + queue ||
        collector_.departures(lane_no) != lane.departed) {
      ++diag.conservation_violations;
    }
    if (collector_.tracked_queue(lane_no) != queue) ++diag.detection_violations;
  }
}

void Simulation::step() {
  if (done()) return;
  const double dt = config_.step_s;
  const double t = clock_s();
  const double rate = config_.demand_veh_per_hour_per_lane / 3600.0;
  const DischargeParams discharge{config_.saturation_headway_s, config_.startup_lost_time_s};

  // (1) arrivals join the back of the queue
  for (Movement m : kAllMovements) {
    Lane& lane = lanes_[static_cast<std::size_t>(index_of(m))];
    const int n = spawn_arrivals(lane.arrivals, rate, dt);
    for (int k = 0; k < n; ++k) {
      lane.arrival_times.push_back(t);
      collector_.on_arrival_belt(lane_index(m), t);
    }
    lane.arrived += n;
    if (n > 0 && is_green_(m)) last_actuation_s_ = t;
  }

  // (2) green movements discharge at saturation flow
  for (Movement m : kAllMovements) {
    Lane& lane = lanes_[static_cast<std::size_t>(index_of(m))];
    const bool green = is_green_(m);
    const int queue = static_cast<int>(lane.arrival_times.size());
    const int n = lane.discharge.step(queue, green, t - lane.green_since_s, dt, discharge);
    for (int k = 0; k < n; ++k) {
      const double wait = t - lane.arrival_times.front();
      lane.arrival_times.pop_front();
      wait_sum_ += wait;
      result_.metrics.max_wait_s = std::max(result_.metrics.max_wait_s, wait);
      collector_.on_departure_belt(lane_index(m), t);
    }
    lane.departed += n;
    if (green) {
      lane.green_seconds += dt;
      if (n > 0) {
        lane.used_green_seconds += dt;
        last_actuation_s_ = t;
      }
    }
  }

  ++step_index_;
  const double now = clock_s();
  check_invariants_();
  if (options_.detection_trace) collector_.write_trace(*options_.detection_trace, t);

  // (3) ask for a new plan once the current one is spent
  const double elapsed = now - phase_start_s_;
  const bool expired = elapsed >= plan_.duration_s() - 1e-9;
  if (!done() && (expired || controller_->terminate_early(elapsed, now - last_actuation_s_))) {
    const LaneArray snapshot = collector_.detected_snapshot(now);
    switch_plan_(controller_->next_plan(snapshot, plan_), now);
    ++result_.diagnostics.decisions;
  }

  // (4) queue statistics
  double total = 0.0;
  for (const Lane& lane : lanes_) {
    const auto q = static_cast<double>(lane.arrival_times.size());
    total += q;
    result_.metrics.max_queue_veh = std::max(result_.metrics.max_queue_veh, q);
  }
  queue_sum_ += total;
  result_.total_queue.push_back(total);
  ++result_.diagnostics.steps;
}

RunResult Simulation::finish() {
  while (!done()) step();

  MetricsRecord& m = result_.metrics;
  long arrived = 0;
  long departed = 0;
  double utilization = 0.0;
  int served = 0;
  for (const Lane& lane : lanes_) {
    arrived += lane.arrived;
    departed += lane.departed;
    if (lane.green_seconds > 0.0) {
      utilization += lane.used_green_seconds / lane.green_seconds;
      ++served;
    }
  }
  result_.diagnostics.total_arrivals = arrived;
  result_.diagnostics.total_departures = departed;

  m.departure_arrival_pct =
      arrived == 0 ? 100.0 : 100.0 * static_cast<double>(departed) / static_cast<double>(arrived);
  const auto samples = static_cast<double>(result_.total_queue.size());
  m.avg_queue_veh = samples > 0 ? queue_sum_ / (samples * kMovementCount) : 0.0;
  m.avg_wait_s = departed > 0 ? wait_sum_ / static_cast<double>(departed) : 0.0;
  m.green_time_utilization = served > 0 ? utilization / served : 0.0;
  m.stability = experiments::observe_stability(result_.total_queue, config_.step_s, m.avg_wait_s,
                                               config_.full_cycle_s);
  return std::move(result_);
}

RunResult simulate(const SimConfig& config, RunOptions options) {
  config.validate();
  return simulate(config, make_controller(config.controller, config.full_cycle_s, config.min_green_s),
                  options);
}

RunResult simulate(const SimConfig& config, std::unique_ptr<Controller> controller,
                   RunOptions options) {
  Simulation sim(config, std::move(controller), options);
  return sim.finish();
}

MetricsRecord run(const SimConfig& config) { return simulate(config).metrics; }

}  // namespace crossflow::sim
