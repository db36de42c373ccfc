#include "crossflow/controller.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>
#include <string>

namespace crossflow {
namespace baseline {

FixedTimePlan FixedTimePlan::standard(double full_cycle_s) {
  using enum Movement;
  return {{{A, B}, {C, D}, {E, F}, {G, H}}, std::vector<double>(4, full_cycle_s / 4.0)};
}

double FixedTimePlan::cycle_s() const {
  return std::accumulate(phase_durations_s.begin(), phase_durations_s.end(), 0.0);
}

void FixedTimePlan::validate() const {
  if (phase_sequence.empty() || phase_sequence.size() != phase_durations_s.size()) {
    throw std::invalid_argument("fixed plan needs one duration per phase");
  }
  for (MovementPair p : phase_sequence) {
    if (!SigGraph::standard().compatible(p)) {
      throw std::invalid_argument("fixed plan phase " + p.str() + " conflicts");
    }
  }
  for (double d : phase_durations_s) {
    if (!(d > 0.0)) throw std::invalid_argument("fixed plan durations must be positive");
  }
}

PhasePlan fixed_next(int current_phase_index, const FixedTimePlan& plan) {
  const int n = static_cast<int>(plan.phase_sequence.size());
  const auto next = static_cast<std::size_t>((current_phase_index + 1) % n);
  return PhasePlan(plan.phase_sequence[next], plan.phase_durations_s[next], plan.cycle_s());
}

void ActuatedParams::validate() const {
  if (!(min_green_s > 0.0) || min_green_s > max_green_s || !(extension_s > 0.0)) {
    throw std::invalid_argument(
        "actuated params need 0 < min_green <= max_green and extension > 0");
  }
}

ActuatedDecision actuated_step(double phase_elapsed_s, double since_actuation_s,
                               const ActuatedParams& params) {
  if (phase_elapsed_s >= params.max_green_s) return ActuatedDecision::Terminate;
  if (phase_elapsed_s >= params.min_green_s && since_actuation_s > params.extension_s) {
    return ActuatedDecision::Terminate;
  }
  return ActuatedDecision::Continue;
}

int next_demanded_phase(int current, const std::vector<MovementPair>& sequence,
                        const LaneArray& snapshot) {
  const int n = static_cast<int>(sequence.size());
  auto demanded = [&](MovementPair p) {
    return snapshot[static_cast<std::size_t>(lane_index(p.first()))].arrival_confirmed ||
           snapshot[static_cast<std::size_t>(lane_index(p.second()))].arrival_confirmed;
  };
  for (int step = 1; step <= n; ++step) {
    const int candidate = (current + step) % n;
    if (demanded(sequence[static_cast<std::size_t>(candidate)])) return candidate;
  }
  return (current + 1) % n;
}

}  // namespace baseline

FixedTimeController::FixedTimeController(baseline::FixedTimePlan plan)
    : plan_(std::move(plan)) {
  plan_.validate();
}

PhasePlan FixedTimeController::initial_plan() {
  index_ = 0;
  return PhasePlan(plan_.phase_sequence.front(), plan_.phase_durations_s.front(),
                   plan_.cycle_s());
}

PhasePlan FixedTimeController::next_plan(const LaneArray&, const PhasePlan&) {
  PhasePlan plan = baseline::fixed_next(index_, plan_);
  index_ = (index_ + 1) % static_cast<int>(plan_.phase_sequence.size());
  return plan;
}

ActuatedController::ActuatedController(baseline::ActuatedParams params,
                                       std::vector<MovementPair> sequence,
                                       double full_cycle_s)
    : params_(params), sequence_(std::move(sequence)), full_cycle_s_(full_cycle_s) {
  params_.validate();
  if (sequence_.empty()) throw std::invalid_argument("actuated sequence is empty");
  if (params_.max_green_s > full_cycle_s_) {
    throw std::invalid_argument("max_green exceeds the full cycle");
  }
}

PhasePlan ActuatedController::initial_plan() {
  index_ = 0;
  return PhasePlan(sequence_.front(), params_.max_green_s, full_cycle_s_);
}

PhasePlan ActuatedController::next_plan(const LaneArray& snapshot, const PhasePlan&) {
  const int n = static_cast<int>(sequence_.size());
  index_ = params_.skip_empty_phases ? baseline::next_demanded_phase(index_, sequence_, snapshot)
                                     : (index_ + 1) % n;
  return PhasePlan(sequence_[static_cast<std::size_t>(index_)], params_.max_green_s,
                   full_cycle_s_);
}

bool ActuatedController::terminate_early(double phase_elapsed_s,
                                         double since_actuation_s) const {
  return baseline::actuated_step(phase_elapsed_s, since_actuation_s, params_) ==
         baseline::ActuatedDecision::Terminate;
}

Dt3pController::Dt3pController(dt3p::LoadWeights weights, dt3p::PhaseTimeParams params)
    : weights_(weights), params_(params) {
  weights_.validate();
  if (!(params_.full_cycle_s > 0.0) || params_.min_green_s > params_.full_cycle_s) {
    throw std::invalid_argument("invalid phase time bounds");
  }
}

PhasePlan Dt3pController::initial_plan() {
  return PhasePlan({Movement::A, Movement::B}, params_.min_green_s, params_.full_cycle_s);
}

PhasePlan Dt3pController::next_plan(const LaneArray& snapshot, const PhasePlan& current) {
  return dt3p::decide(snapshot, current, weights_, params_);
}

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::BM1: return "BM1";
    case ControllerKind::BM2: return "BM2";
    case ControllerKind::DT3P: return "DT3P";
  }
  return "?";
}

ControllerKind parse_controller_kind(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "BM1") return ControllerKind::BM1;
  if (upper == "BM2") return ControllerKind::BM2;
  if (upper == "DT3P") return ControllerKind::DT3P;
  throw std::invalid_argument("unknown controller: " + std::string(text));
}

std::unique_ptr<Controller> make_controller(const ControllerSpec& spec, double full_cycle_s,
                                            double min_green_s) {
  switch (spec.kind) {
    case ControllerKind::BM1:
      return std::make_unique<FixedTimeController>(spec.fixed_plan);
    case ControllerKind::BM2:
      return std::make_unique<ActuatedController>(spec.actuated,
                                                  spec.fixed_plan.phase_sequence, full_cycle_s);
    case ControllerKind::DT3P:
      return std::make_unique<Dt3pController>(
          spec.weights, dt3p::PhaseTimeParams{full_cycle_s, min_green_s});
  }
  throw std::invalid_argument("unhandled controller kind");
}

}  // namespace crossflow
