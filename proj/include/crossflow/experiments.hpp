// Replicated evaluation: sample sizing, the controller x demand grid,
// points-order ranking and report emission.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossflow/controller.hpp"
#include "crossflow/sim.hpp"
#include "crossflow/stability.hpp"

namespace crossflow::experiments {

struct ConfidenceParams {
  double z = 1.96;
  double sigma = 0.5;
  double margin = 0.05;
};

/// Finite-population sample size, rounded to the nearest integer.
int sample_size(long population, const ConfidenceParams& p = {});

struct DemandLevel {
  std::string name;
  double rate_veh_per_hour_per_lane;
};

/// very-small 250, small 375, medium 750, large 1125, very-large 1300.
const std::vector<DemandLevel>& standard_demand_levels();
/// Throws std::invalid_argument for unknown names.
DemandLevel demand_level(std::string_view name);

enum class Better { Higher, Lower };

inline constexpr int kMeasuredFactors = 6;

/// The six ranked factors, in table order.
inline constexpr std::array<std::string_view, kMeasuredFactors> kFactorNames = {
    "departure_arrival_pct", "avg_queue_veh", "max_queue_veh",
    "avg_wait_s",            "max_wait_s",    "green_time_utilization"};

inline constexpr std::array<Better, kMeasuredFactors> kFactorDirections = {
    Better::Higher, Better::Lower, Better::Lower, Better::Lower, Better::Lower, Better::Higher};

std::array<double, kMeasuredFactors> measured_factors(const sim::MetricsRecord& m);

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RankTable {
  /// points[factor][method]; best gets M, worst 1, ties share the average.
  std::vector<std::vector<double>> points;
  std::vector<int> stability;
  std::vector<double> overall;
};

/// `values[factor][method]`. Methods with stability 0 are left out of the
/// per-factor ordering (0 points) and score 0 overall; the rest are ranked
/// among themselves.
RankTable rank_methods(const std::vector<std::vector<double>>& values,
                       const std::vector<Better>& directions, const std::vector<int>& stability);

struct ReplicationPolicy {
  bool paper = false;  // use sample_size(demand) per level
  int fixed = 20;

  int count(const DemandLevel& level) const;
};

struct GridConfig {
  std::vector<ControllerSpec> controllers;
  std::vector<DemandLevel> demand_levels = standard_demand_levels();
  ReplicationPolicy replications{};
  std::uint64_t seed_base = 1;
  /// Template for every run; demand, seed and controller are overwritten.
  sim::SimConfig sim{};

  void validate() const;
};

struct FactorSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct CellResult {
  std::string controller;
  int replications = 0;
  sim::MetricsRecord mean;  // stability is the AND over replications
  std::array<FactorSummary, kMeasuredFactors> spread{};
};

struct LevelResult {
  DemandLevel level;
  std::vector<CellResult> cells;  // one per controller, config order
  RankTable ranking;
};

struct GridReport {
  std::vector<LevelResult> levels;
  long runs = 0;
  long conservation_violations = 0;
  long conflict_violations = 0;
  long detection_violations = 0;
  bool complete = true;
  std::string error;
};

/// Aggregate replications of one (controller, demand) cell.
CellResult aggregate(std::string controller, const std::vector<sim::MetricsRecord>& reps);

/// Every cell runs replications with seeds seed_base + replication index.
/// Work is spread over `jobs` threads; results are keyed by task index so the
/// report does not depend on completion order. A failed run marks the report
/// incomplete and keeps the levels finished before it.
GridReport run_grid(const GridConfig& config, int jobs = 1);

/// Writes level_<name>.csv per level, ranking.csv, overall_scores.csv and
/// report.json into `dir` (created if missing).
void write_report(const GridReport& report, const GridConfig& config,
                  const std::filesystem::path& dir);

std::string level_table_csv(const LevelResult& level);
std::string ranking_csv(const GridReport& report);
std::string overall_scores_csv(const GridReport& report);
std::string report_json(const GridReport& report, const GridConfig& config);

/// Fixed six-significant-digit formatting used by every CSV.
std::string format_number(double v);

}  // namespace crossflow::experiments
