#include "crossflow/dt3p.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crossflow::dt3p {

void LoadWeights::validate() const {
  const double parts[] = {occupancy, wait, priority, back_road, next_road};
  double sum = 0.0;
  for (double w : parts) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("load weights must be finite and non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("load weights must sum to 1, got " + std::to_string(sum));
  }
  if (!(wait_norm_s > 0.0)) throw std::invalid_argument("wait_norm_s must be positive");
}

double compute_lane_load(const LaneState& lane, const LoadWeights& w) {
  if (!lane.arrival_confirmed) return 0.0;
  const double occupancy = std::clamp(lane.occupancy_pct / 100.0, 0.0, 1.0);
  const double wait = std::min(lane.head_wait_s / w.wait_norm_s, 1.0);
  const double emergency = lane.on_duty ? lane.priority : 0.0;
  const double back = std::min(
      static_cast<double>(lane.back_road_queue) / kDetectionCapacity, 1.0);
  const double next_free =
      std::clamp((100.0 - lane.next_road_occupancy_pct) / 100.0, 0.0, 1.0);
  return w.occupancy * occupancy + w.wait * wait + w.priority * emergency +
         w.back_road * back + w.next_road * next_free;
}

LoadVector compute_loads(const LaneArray& lanes, const LoadWeights& weights) {
  LoadVector loads{};
  for (Movement m : kAllMovements) {
    at(loads, m) = compute_lane_load(lanes[static_cast<std::size_t>(lane_index(m))], weights);
  }
  return loads;
}

std::vector<MovementPair> candidate_pairs(Movement g1, Movement g2, const SigGraph& sig) {
  if (g1 == g2 || sig.conflicts_with(g1, g2)) {
    throw InvalidCurrentGreens(std::string("current greens conflict: ") + letter(g1) +
                               letter(g2));
  }
  std::vector<MovementPair> out;
  for (Movement x : sig.conflicts(g1)) {
    for (Movement y : sig.conflicts(g2)) {
      if (x == y || sig.conflicts_with(x, y)) continue;
      out.emplace_back(x, y);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MovementPair select_next_greens(const LoadVector& loads, Movement g1, Movement g2,
                                const SigGraph& sig) {
  const auto candidates = candidate_pairs(g1, g2, sig);
  // Candidates are sorted, so strict > keeps the smallest pair on ties.
  MovementPair best = candidates.front();
  double best_score = at(loads, best.first()) + at(loads, best.second());
  for (const MovementPair& p : candidates) {
    const double score = at(loads, p.first()) + at(loads, p.second());
    if (score > best_score) {
      best = p;
      best_score = score;
    }
  }
  return best;
}

std::vector<int> confirmed_queues(std::span<const int> v_c, std::span<const bool> c_fva) {
  if (v_c.size() != c_fva.size()) {
    throw std::invalid_argument("queue and flag arrays differ in length");
  }
  std::vector<int> out(v_c.size());
  for (std::size_t i = 0; i < v_c.size(); ++i) out[i] = c_fva[i] ? v_c[i] : 0;
  return out;
}

double compute_phase_time(const PerMovement<int>& v_c, const PerMovement<bool>& c_fva,
                          MovementPair current, MovementPair next,
                          const PhaseTimeParams& params, const SigGraph& sig) {
  const auto confirmed = confirmed_queues(v_c, c_fva);

  auto green_share = [&](Movement n) {
    double competing = 0.0;
    for (Movement i : kAllMovements) {
      if (!sig.conflicts_with(i, n) || current.contains(i)) continue;
      competing += confirmed[static_cast<std::size_t>(index_of(i))];
    }
    // Numerator is the raw queue, not the confirmed one.
    const double ratio = competing == 0.0 ? 1.0 : at(v_c, n) / competing;
    return ratio * params.full_cycle_s;
  };

  const double average = 0.5 * (green_share(next.first()) + green_share(next.second()));
  return std::clamp(average, params.min_green_s, params.full_cycle_s);
}

PhasePlan decide(const LaneArray& snapshot, const PhasePlan& current,
                 const LoadWeights& weights, const PhaseTimeParams& params) {
  const LoadVector loads = compute_loads(snapshot, weights);
  const MovementPair greens = current.greens();
  const MovementPair next = select_next_greens(loads, greens.first(), greens.second());

  PerMovement<int> queues{};
  PerMovement<bool> flags{};
  for (Movement m : kAllMovements) {
    const LaneState& lane = snapshot[static_cast<std::size_t>(lane_index(m))];
    at(queues, m) = lane.detected_queue_veh;
    at(flags, m) = lane.arrival_confirmed;
  }
  const double duration = compute_phase_time(queues, flags, greens, next, params);
  return PhasePlan(next, duration, params.full_cycle_s);
}

}  // namespace crossflow::dt3p
