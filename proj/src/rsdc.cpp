#include "crossflow/rsdc.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace crossflow::rsdc {

Responsibility handover_evaluate(int true_queue, const BeltLayout& layout) {
  const int level = std::min(std::max(true_queue, 0) / layout.veh_per_segment, layout.rse_count);
  return {level, std::max(layout.rse_count - level, 1)};
}

Collector::Collector(BeltLayout layout) : layout_(layout) {
  if (layout_.veh_per_segment <= 0 || layout_.rse_count <= 0) {
    throw std::invalid_argument("belt layout needs positive segment capacity and RSE count");
  }
  for (auto& d : lanes_) d.responsibility = handover_evaluate(0, layout_);
}

Collector::LaneDetector& Collector::lane_(int lane) {
  if (lane < 1 || lane > kLaneCount) throw std::out_of_range("lane " + std::to_string(lane));
  return lanes_[static_cast<std::size_t>(lane)];
}

const Collector::LaneDetector& Collector::lane_(int lane) const {
  if (lane < 1 || lane > kLaneCount) throw std::out_of_range("lane " + std::to_string(lane));
  return lanes_[static_cast<std::size_t>(lane)];
}

void Collector::reevaluate_(int lane, double t_s) {
  LaneDetector& d = lane_(lane);
  const Responsibility next = handover_evaluate(d.queue, layout_);
  if (next != d.responsibility) {
    handovers_.push_back({t_s, lane, d.responsibility, next});
    d.responsibility = next;
  }
}

void Collector::on_arrival_belt(int lane, double t_s) {
  LaneDetector& d = lane_(lane);
  if (d.queue == 0) d.wait_start_s = t_s;
  d.confirmed = true;
  ++d.queue;
  reevaluate_(lane, t_s);
}

void Collector::on_departure_belt(int lane, double t_s) {
  LaneDetector& d = lane_(lane);
  ++d.departures;
  if (d.queue == 0) {
    ++d.underflows;
    return;
  }
  if (--d.queue == 0) {
    d.confirmed = false;
    d.wait_start_s = 0.0;
  }
  reevaluate_(lane, t_s);
}

LaneState Collector::state_of_(const LaneDetector& d, double t_s) const {
  LaneState s;
  s.true_queue_veh = d.queue;
  s.detected_queue_veh = std::min(d.queue, layout_.capacity());
  s.arrival_confirmed = d.confirmed;
  s.occupancy_pct =
      100.0 * std::min(d.queue, layout_.veh_per_segment) / layout_.veh_per_segment;
  s.head_wait_s = d.queue > 0 ? std::max(t_s - d.wait_start_s, 0.0) : 0.0;
  s.priority = d.extras.priority;
  s.on_duty = d.extras.on_duty;
  s.back_road_queue = d.extras.back_road_queue;
  s.next_road_occupancy_pct = d.extras.next_road_occupancy_pct;
  return s;
}

LaneArray Collector::detected_snapshot(double t_s) const {
  LaneArray out{};
  for (int lane = 1; lane <= kLaneCount; ++lane) {
    out[static_cast<std::size_t>(lane)] = state_of_(lane_(lane), t_s);
  }
  return out;
}

void Collector::write_trace_header(std::ostream& out) {
  out << "t,lane,V_C,C_FVA,V_C%,L_W,responsible_rse\n";
}

void Collector::write_trace(std::ostream& out, double t_s) const {
  for (Movement m : kAllMovements) {
    const int lane = lane_index(m);
    const LaneDetector& d = lane_(lane);
    const LaneState s = state_of_(d, t_s);
    out << fmt::format("{:.6g},{},{},{},{:.6g},{:.6g},{}\n", t_s, lane, s.detected_queue_veh,
                       s.arrival_confirmed ? 1 : 0, s.occupancy_pct, s.head_wait_s,
                       d.responsibility.responsible_rse);
  }
}

}  // namespace crossflow::rsdc
