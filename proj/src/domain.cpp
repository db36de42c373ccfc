#include "crossflow/domain.hpp"

#include <algorithm>
#include <cmath>

namespace crossflow {

std::optional<Movement> parse_movement(char c) {
  if (c >= 'a' && c <= 'h') c = static_cast<char>(c - 'a' + 'A');
  if (c < 'A' || c > 'H') return std::nullopt;
  return static_cast<Movement>(c - 'A');
}

SigGraph::SigGraph() {
  using enum Movement;
  conflicts_ = {{
      {C, F, G, H},  // A
      {C, D, E, H},  // B
      {A, B, E, H},  // C
      {B, E, F, G},  // D
      {B, C, D, G},  // E
      {A, D, G, H},  // F
      {A, D, E, F},  // G
      {A, B, C, F},  // H
  }};
  for (Movement m : kAllMovements) {
    for (Movement n : conflicts(m)) {
      matrix_[static_cast<std::size_t>(index_of(m))]
             [static_cast<std::size_t>(index_of(n))] = true;
    }
  }
}

const SigGraph& SigGraph::standard() {
  static const SigGraph graph;
  return graph;
}

bool conflicts_with(Movement a, Movement b) {
  return SigGraph::standard().conflicts_with(a, b);
}

const std::vector<MovementPair>& compatible_pairs() {
  static const std::vector<MovementPair> pairs = [] {
    std::vector<MovementPair> out;
    for (Movement a : kAllMovements) {
      for (Movement b : kAllMovements) {
        if (a < b && !conflicts_with(a, b)) out.emplace_back(a, b);
      }
    }
    return out;
  }();
  return pairs;
}

PhasePlan::PhasePlan(MovementPair greens, double duration_s, double full_cycle_s)
    : greens_(greens), duration_s_(duration_s) {
  if (!SigGraph::standard().compatible(greens)) {
    throw InvalidPhase("conflicting greens " + greens.str());
  }
  if (!(duration_s > 0.0) || duration_s > full_cycle_s) {
    throw InvalidPhase("phase duration out of range: " + std::to_string(duration_s));
  }
}

bool LaneState::valid() const {
  auto in_pct = [](double v) { return v >= 0.0 && v <= 100.0; };
  return true_queue_veh >= 0 && detected_queue_veh >= 0 &&
         detected_queue_veh <= true_queue_veh &&
         detected_queue_veh <= kDetectionCapacity && head_wait_s >= 0.0 &&
         (!arrival_confirmed || true_queue_veh >= 1) && in_pct(occupancy_pct) &&
         priority >= 0.0 && priority <= 1.0 && back_road_queue >= 0 &&
         in_pct(next_road_occupancy_pct) && std::isfinite(head_wait_s);
}

}  // namespace crossflow
