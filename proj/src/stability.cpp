#include "crossflow/stability.hpp"

#include <cmath>
#include <cstddef>

namespace crossflow::experiments {

double least_squares_slope(std::span<const double> values, double step_s) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  // Centered x keeps the sums small for long traces.
  const double x_mean = 0.5 * static_cast<double>(n - 1);
  double y_mean = 0.0;
  for (double v : values) y_mean += v;
  y_mean /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - x_mean;
    sxy += dx * (values[i] - y_mean);
    sxx += dx * dx;
  }
  return sxy / sxx / step_s;
}

int observe_stability(std::span<const double> total_queue, double step_s, double avg_wait_s,
                      double full_cycle_s, const StabilityThresholds& thresholds) {
  if (avg_wait_s > thresholds.wait_cycles * full_cycle_s) return 0;
  const auto tail = static_cast<std::size_t>(
      std::ceil(thresholds.tail_fraction * static_cast<double>(total_queue.size())));
  if (tail >= 2 &&
      least_squares_slope(total_queue.last(tail), step_s) > thresholds.max_tail_slope) {
    return 0;
  }
  return 1;
}

}  // namespace crossflow::experiments
