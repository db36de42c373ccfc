#pragma once

#include <span>

namespace crossflow::experiments {

struct StabilityThresholds {
  /// A run is unstable once the mean per-vehicle wait exceeds this many
  /// full cycles.
  double wait_cycles = 10.0;
  /// Least-squares growth of the total queue over the tail of the run, veh/s.
  double max_tail_slope = 0.05;
  /// Fraction of the run (from the end) fitted for the slope.
  double tail_fraction = 0.25;
};

/// Least-squares slope of `values` sampled every `step_s` seconds.
double least_squares_slope(std::span<const double> values, double step_s);

/// 1 when the run stayed bounded, 0 when it diverged. `total_queue` holds the
/// summed true queue at the end of every step.
int observe_stability(std::span<const double> total_queue, double step_s, double avg_wait_s,
                      double full_cycle_s, const StabilityThresholds& thresholds = {});

}  // namespace crossflow::experiments
