// Pluggable traffic-light controllers: the dynamic phase-plan controller and
// the fixed-time and fully-actuated baselines.
#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "crossflow/domain.hpp"
#include "crossflow/dt3p.hpp"

namespace crossflow {

/// A controller hands out one PhasePlan at a time. The simulator asks for the
/// next plan once the current one has run its duration, or earlier if
/// terminate_early says so.
class Controller {
 public:
  virtual ~Controller() = default;

  virtual std::string_view name() const = 0;
  virtual PhasePlan initial_plan() = 0;
  /// `snapshot` is the detected view of every lane (index 1..12).
  virtual PhasePlan next_plan(const LaneArray& snapshot, const PhasePlan& current) = 0;
  virtual bool terminate_early(double /*phase_elapsed_s*/,
                               double /*since_actuation_s*/) const {
    return false;
  }
};

namespace baseline {

struct FixedTimePlan {
  std::vector<MovementPair> phase_sequence;
  std::vector<double> phase_durations_s;

  /// AB -> CD -> EF -> GH, equal split of the cycle.
  static FixedTimePlan standard(double full_cycle_s = dt3p::kDefaultFullCycleS);

  double cycle_s() const;
  /// Throws std::invalid_argument on empty, mismatched, conflicting or
  /// non-positive entries.
  void validate() const;
};

/// Plan following phase `current_phase_index` in cyclic order.
PhasePlan fixed_next(int current_phase_index, const FixedTimePlan& plan);

struct ActuatedParams {
  double min_green_s = 10.0;
  double extension_s = 3.0;
  double max_green_s = 60.0;
  bool skip_empty_phases = true;

  void validate() const;
};

enum class ActuatedDecision { Continue, Terminate };

ActuatedDecision actuated_step(double phase_elapsed_s, double since_actuation_s,
                               const ActuatedParams& params);

/// Index of the phase after `current` in `sequence`, skipping phases with no
/// confirmed arrival on either movement. Falls back to plain cyclic order
/// when every other phase is empty.
int next_demanded_phase(int current, const std::vector<MovementPair>& sequence,
                        const LaneArray& snapshot);

}  // namespace baseline

class FixedTimeController final : public Controller {
 public:
  explicit FixedTimeController(baseline::FixedTimePlan plan);
  std::string_view name() const override { return "BM1"; }
  PhasePlan initial_plan() override;
  PhasePlan next_plan(const LaneArray& snapshot, const PhasePlan& current) override;

 private:
  baseline::FixedTimePlan plan_;
  int index_ = 0;
};

class ActuatedController final : public Controller {
 public:
  ActuatedController(baseline::ActuatedParams params, std::vector<MovementPair> sequence,
                     double full_cycle_s = dt3p::kDefaultFullCycleS);
  std::string_view name() const override { return "BM2"; }
  PhasePlan initial_plan() override;
  PhasePlan next_plan(const LaneArray& snapshot, const PhasePlan& current) override;
  bool terminate_early(double phase_elapsed_s, double since_actuation_s) const override;

 private:
  baseline::ActuatedParams params_;
  std::vector<MovementPair> sequence_;
  double full_cycle_s_;
  int index_ = 0;
};

class Dt3pController final : public Controller {
 public:
  Dt3pController(dt3p::LoadWeights weights, dt3p::PhaseTimeParams params);
  std::string_view name() const override { return "DT3P"; }
  PhasePlan initial_plan() override;
  PhasePlan next_plan(const LaneArray& snapshot, const PhasePlan& current) override;

 private:
  dt3p::LoadWeights weights_;
  dt3p::PhaseTimeParams params_;
};

enum class ControllerKind { BM1, BM2, DT3P };

std::string_view to_string(ControllerKind kind);
/// Accepts "bm1", "BM1", etc. Throws std::invalid_argument otherwise.
ControllerKind parse_controller_kind(std::string_view text);

/// Everything needed to build a fresh controller for one replication.
struct ControllerSpec {
  ControllerKind kind = ControllerKind::DT3P;
  dt3p::LoadWeights weights{};
  baseline::FixedTimePlan fixed_plan = baseline::FixedTimePlan::standard();
  baseline::ActuatedParams actuated{};
};

std::unique_ptr<Controller> make_controller(const ControllerSpec& spec, double full_cycle_s,
                                            double min_green_s = dt3p::kDefaultMinGreenS);

}  // namespace crossflow
