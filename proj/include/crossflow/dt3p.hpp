// Decision kernel of the dynamic phase-plan controller: lane loads, next-green
// selection on the conflict graph, and next-phase duration.
#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "crossflow/domain.hpp"

namespace crossflow::dt3p {

template <typename T>
using PerMovement = std::array<T, kMovementCount>;

using LoadVector = PerMovement<double>;

template <typename T>
constexpr T& at(PerMovement<T>& a, Movement m) {
  return a[static_cast<std::size_t>(index_of(m))];
}
template <typename T>
constexpr const T& at(const PerMovement<T>& a, Movement m) {
  return a[static_cast<std::size_t>(index_of(m))];
}

/// Convex weights of the five load factors plus the wait normalizer.
struct LoadWeights {
  double occupancy = 0.40;
  double wait = 0.30;
  double priority = 0.20;
  double back_road = 0.05;
  double next_road = 0.05;
  double wait_norm_s = 300.0;

  /// Throws std::invalid_argument unless all weights are >= 0, sum to 1
  /// within 1e-9, and wait_norm_s > 0.
  void validate() const;
};

inline constexpr double kDefaultFullCycleS = 120.0;
inline constexpr double kDefaultMinGreenS = 5.0;

struct InvalidCurrentGreens : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Weighted load in [0, 1]; zero unless the lane's first arrival is confirmed.
double compute_lane_load(const LaneState& lane, const LoadWeights& weights);

LoadVector compute_loads(const LaneArray& lanes, const LoadWeights& weights);

/// Pairs drawn one from each current green's conflict list, with self pairs,
/// conflicting pairs and duplicates removed. Sorted ascending.
std::vector<MovementPair> candidate_pairs(Movement g1, Movement g2,
                                          const SigGraph& sig = SigGraph::standard());

/// Highest summed load among the candidates; ties go to the smallest pair.
MovementPair select_next_greens(const LoadVector& loads, Movement g1, Movement g2,
                                const SigGraph& sig = SigGraph::standard());

/// Elementwise V_C * C_FVA.
std::vector<int> confirmed_queues(std::span<const int> v_c, std::span<const bool> c_fva);

struct PhaseTimeParams {
  double full_cycle_s = kDefaultFullCycleS;
  double min_green_s = kDefaultMinGreenS;
};

/// Share of the full cycle granted to the next greens: for each next green,
/// its own queue over the confirmed queues of its non-green conflicting
/// movements (1 when that sum is zero), scaled by the cycle; the two shares
/// are averaged and clamped to [min_green_s, full_cycle_s].
double compute_phase_time(const PerMovement<int>& v_c, const PerMovement<bool>& c_fva,
                          MovementPair current, MovementPair next,
                          const PhaseTimeParams& params = {},
                          const SigGraph& sig = SigGraph::standard());

/// Full pipeline: loads, next greens, next phase time.
PhasePlan decide(const LaneArray& snapshot, const PhasePlan& current,
                 const LoadWeights& weights, const PhaseTimeParams& params = {});

}  // namespace crossflow::dt3p
