// Core vocabulary of the four-leg intersection: movements, the conflict
// graph, phase plans and per-lane state.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crossflow {

/// The eight signalized movements. Nodes of the conflict graph.
enum class Movement : std::uint8_t { A, B, C, D, E, F, G, H };

inline constexpr int kMovementCount = 8;
inline constexpr int kLaneCount = 12;

/// Vehicles per 150 m queuing segment, and segments (RSEs) per lane.
inline constexpr int kVehPerSegment = 25;
inline constexpr int kSegmentsPerLane = 3;
inline constexpr int kDetectionCapacity = kVehPerSegment * kSegmentsPerLane;

inline constexpr std::array<Movement, kMovementCount> kAllMovements = {
    Movement::A, Movement::B, Movement::C, Movement::D,
    Movement::E, Movement::F, Movement::G, Movement::H};

/// Lanes 3, 6, 9 and 12 are uncontrolled slip lanes.
inline constexpr std::array<int, 4> kSlipLanes = {3, 6, 9, 12};

constexpr int index_of(Movement m) { return static_cast<int>(m); }

constexpr int lane_index(Movement m) {
  constexpr std::array<int, kMovementCount> lanes = {1, 2, 4, 5, 7, 8, 10, 11};
  return lanes[static_cast<std::size_t>(m)];
}

/// Inverse of lane_index; empty for slip lanes and out-of-range indices.
constexpr std::optional<Movement> movement_for_lane(int lane) {
  for (Movement m : kAllMovements) {
    if (lane_index(m) == lane) return m;
  }
  return std::nullopt;
}

constexpr char letter(Movement m) { return static_cast<char>('A' + index_of(m)); }

std::optional<Movement> parse_movement(char c);

/// Unordered pair of distinct movements, stored with first < second.
class MovementPair {
 public:
  constexpr MovementPair(Movement a, Movement b)
      : first_(a < b ? a : b), second_(a < b ? b : a) {}

  constexpr Movement first() const { return first_; }
  constexpr Movement second() const { return second_; }
  constexpr bool contains(Movement m) const { return m == first_ || m == second_; }

  friend constexpr bool operator==(MovementPair, MovementPair) = default;
  /// Lexicographic by lane index, which coincides with movement order.
  friend constexpr auto operator<=>(MovementPair, MovementPair) = default;

  std::string str() const { return {letter(first_), letter(second_)}; }

 private:
  Movement first_;
  Movement second_;
};

/// The fixed eight-node conflict graph. Every node conflicts with exactly four
/// others and is compatible with the remaining three.
class SigGraph {
 public:
  static const SigGraph& standard();

  const std::array<Movement, 4>& conflicts(Movement m) const {
    return conflicts_[static_cast<std::size_t>(index_of(m))];
  }
  bool conflicts_with(Movement a, Movement b) const {
    return matrix_[static_cast<std::size_t>(index_of(a))]
                  [static_cast<std::size_t>(index_of(b))];
  }
  bool compatible(MovementPair p) const {
    return p.first() != p.second() && !conflicts_with(p.first(), p.second());
  }

 private:
  SigGraph();
  std::array<std::array<Movement, 4>, kMovementCount> conflicts_;
  std::array<std::array<bool, kMovementCount>, kMovementCount> matrix_{};
};

bool conflicts_with(Movement a, Movement b);

/// All twelve unordered non-conflicting pairs, sorted.
const std::vector<MovementPair>& compatible_pairs();

struct InvalidPhase : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A pair of compatible greens held for a duration.
class PhasePlan {
 public:
  /// Throws InvalidPhase if the pair conflicts or the duration is outside
  /// (0, full_cycle_s].
  PhasePlan(MovementPair greens, double duration_s, double full_cycle_s);

  MovementPair greens() const { return greens_; }
  double duration_s() const { return duration_s_; }

  friend bool operator==(const PhasePlan&, const PhasePlan&) = default;

 private:
  MovementPair greens_;
  double duration_s_;
};

/// Controller-facing view of one lane. True and detected queues are kept
/// separate; the controller only ever reads the detected fields.
struct LaneState {
  int true_queue_veh = 0;
  int detected_queue_veh = 0;
  double head_wait_s = 0.0;            // L_W
  bool arrival_confirmed = false;      // C_FVA
  double occupancy_pct = 0.0;          // V_C%
  double priority = 0.0;               // L_P
  bool on_duty = false;                // L_D
  int back_road_queue = 0;             // V_NQB
  double next_road_occupancy_pct = 100.0;  // V_TNN%

  bool valid() const;
};

/// Lanes indexed 1..12; element 0 is unused.
using LaneArray = std::array<LaneState, kLaneCount + 1>;

struct IntersectionState {
  double clock_s = 0.0;
  LaneArray lanes{};
  MovementPair current_greens{Movement::A, Movement::B};
  double phase_elapsed_s = 0.0;
};

}  // namespace crossflow
