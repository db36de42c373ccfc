// JSON experiment configuration.
//
// {
//   "controllers": ["bm1", "bm2", {"name": "dt3p", "load_weights": {...}}],
//   "demand_levels": ["very-small", {"name": "custom", "rate": 500}],
//   "duration_s": 3600,
//   "seed_base": 1,
//   "replications": "paper" | 20 | {"fixed": 20},
//   "output_dir": "out",
//   "load_weights": {"occupancy": 0.4, "wait": 0.3, "priority": 0.2,
//                    "back_road": 0.05, "next_road": 0.05, "wait_norm_s": 300},
//   "bm1_durations_s": [30, 30, 30, 30],
//   "bm2": {"min_green_s": 10, "extension_s": 3, "max_green_s": 60,
//           "skip_empty_phases": true},
//   "sim": {"step_s": 1, "saturation_headway_s": 2, "startup_lost_time_s": 2,
//           "full_cycle_s": 120, "min_green_s": 5}
// }
//
// Every key is optional except "controllers". Top-level load_weights, bm1 and
// bm2 settings apply to every controller; a controller object may override
// them with the same keys.
#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "crossflow/experiments.hpp"

namespace crossflow {

struct GridConfigFile {
  experiments::GridConfig grid;
  std::optional<std::string> output_dir;
};

/// Throws sim::ConfigError with a readable message on any malformed field.
GridConfigFile parse_grid_config(const nlohmann::json& j);
GridConfigFile load_grid_config(const std::filesystem::path& path);

/// Resolved configuration, every default spelled out.
nlohmann::ordered_json config_to_json(const experiments::GridConfig& config);

/// Applies "load_weights", "bm1_durations_s", "bm2" and "sim" keys of `j`
/// onto an existing single-run config.
void apply_run_overrides(const nlohmann::json& j, sim::SimConfig& config);

}  // namespace crossflow
