// Road status data collection: sensor belts per lane, queue-detection
// responsibility handover between roadside units, and the detected snapshot
// handed to the controller.
#pragma once

#include <array>
#include <ostream>
#include <vector>

#include "crossflow/domain.hpp"

namespace crossflow::rsdc {

struct BeltLayout {
  double segment_length_m = 150.0;
  int veh_per_segment = kVehPerSegment;
  int rse_count = kSegmentsPerLane;
  double stopline_belt_separation_m = 8.0;

  int capacity() const { return veh_per_segment * rse_count; }
};

/// Which roadside unit measures a lane's queue. RSE numbering follows the
/// belt order: RSE-`rse_count` sits nearest the stop line and owns short
/// queues; each full segment hands responsibility one unit further upstream.
/// `level` counts full segments (0..rse_count); at level == rse_count the
/// queue has overrun detection coverage.
struct Responsibility {
  int level = 0;
  int responsible_rse = kSegmentsPerLane;

  bool overflow(const BeltLayout& layout) const { return level >= layout.rse_count; }
  friend bool operator==(const Responsibility&, const Responsibility&) = default;
};

Responsibility handover_evaluate(int true_queue, const BeltLayout& layout = {});

struct HandoverEvent {
  double t_s;
  int lane;
  Responsibility from;
  Responsibility to;
};

/// Static per-lane inputs that are not sensed by the belts.
struct LaneExtras {
  double priority = 0.0;
  bool on_duty = false;
  int back_road_queue = 0;
  double next_road_occupancy_pct = 100.0;
};

class Collector {
 public:
  explicit Collector(BeltLayout layout = {});

  const BeltLayout& layout() const { return layout_; }

  void on_arrival_belt(int lane, double t_s);
  void on_departure_belt(int lane, double t_s);

  /// Detected view of all lanes at time t. Detection is ideal, so the tracked
  /// count equals the ground-truth queue; V_C saturates at capacity.
  LaneArray detected_snapshot(double t_s) const;

  int tracked_queue(int lane) const { return lane_(lane).queue; }
  bool arrival_confirmed(int lane) const { return lane_(lane).confirmed; }
  long departures(int lane) const { return lane_(lane).departures; }
  long underflows(int lane) const { return lane_(lane).underflows; }
  Responsibility responsibility(int lane) const { return lane_(lane).responsibility; }
  const std::vector<HandoverEvent>& handovers() const { return handovers_; }
  void clear_handover_log() { handovers_.clear(); }

  void set_extras(int lane, const LaneExtras& extras) { lane_(lane).extras = extras; }

  /// One CSV line per signalized lane: t,lane,V_C,C_FVA,V_C%,L_W,responsible_rse
  void write_trace(std::ostream& out, double t_s) const;
  static void write_trace_header(std::ostream& out);

 private:
  struct LaneDetector {
    int queue = 0;
    bool confirmed = false;
    double wait_start_s = 0.0;
    long departures = 0;
    long underflows = 0;
    Responsibility responsibility{};
    LaneExtras extras{};
  };

  LaneDetector& lane_(int lane);
  const LaneDetector& lane_(int lane) const;
  void reevaluate_(int lane, double t_s);
  LaneState state_of_(const LaneDetector& d, double t_s) const;

  BeltLayout layout_;
  std::array<LaneDetector, kLaneCount + 1> lanes_{};
  std::vector<HandoverEvent> handovers_;
};

}  // namespace crossflow::rsdc
