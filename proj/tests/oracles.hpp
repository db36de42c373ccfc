// Test-only reference implementations. They work from their own copy of the
// conflict table and plain enumeration, never from the library's kernels.
#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "crossflow/dt3p.hpp"

namespace crossflow::test {

inline bool oracle_conflict(Movement a, Movement b) {
  static constexpr const char* table[8] = {"CFGH", "CDEH", "ABEH", "BEFG",
                                           "BCDG", "ADGH", "ADEF", "ABCF"};
  for (const char* c = table[index_of(a)]; *c; ++c) {
    if (*c == letter(b)) return true;
  }
  return false;
}

/// Every unordered pair {x, y} with x drawn from g1's conflicts and y from
/// g2's, minus self pairs and conflicting pairs. Sorted.
inline std::vector<MovementPair> oracle_candidates(Movement g1, Movement g2) {
  std::vector<MovementPair> out;
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; ++j) {
      const auto x = static_cast<Movement>(i);
      const auto y = static_cast<Movement>(j);
      if (oracle_conflict(x, y)) continue;
      const bool forward = oracle_conflict(g1, x) && oracle_conflict(g2, y);
      const bool backward = oracle_conflict(g1, y) && oracle_conflict(g2, x);
      if (forward || backward) out.emplace_back(x, y);
    }
  }
  return out;
}

inline MovementPair oracle_select(const dt3p::LoadVector& loads, Movement g1, Movement g2) {
  const auto pairs = oracle_candidates(g1, g2);
  auto score = [&](MovementPair p) {
    return loads[index_of(p.first())] + loads[index_of(p.second())];
  };
  MovementPair best = pairs.front();
  for (MovementPair p : pairs) {
    const double s = score(p);
    const double b = score(best);
    if (s > b || (s == b && p < best)) best = p;
  }
  return best;
}

inline double oracle_phase_time(const dt3p::PerMovement<int>& v_c,
                                const dt3p::PerMovement<bool>& c_fva, MovementPair current,
                                MovementPair next, double cycle, double min_green) {
  double times[2];
  const Movement greens[2] = {next.first(), next.second()};
  for (int k = 0; k < 2; ++k) {
    double total = 0;
    for (int i = 0; i < 8; ++i) {
      const auto m = static_cast<Movement>(i);
      const bool adjacent = oracle_conflict(m, greens[k]);
      const bool currently_green = m == current.first() || m == current.second();
      total += v_c[i] * (c_fva[i] ? 1 : 0) * (adjacent ? 1 : 0) * (currently_green ? 0 : 1);
    }
    const double ratio = total == 0 ? 1.0 : v_c[index_of(greens[k])] / total;
    times[k] = ratio * cycle;
  }
  const double avg = (times[0] + times[1]) / 2;
  return std::min(std::max(avg, min_green), cycle);
}

}  // namespace crossflow::test
