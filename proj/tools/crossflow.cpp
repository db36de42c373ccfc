// crossflow: single runs and replicated experiment grids.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "crossflow/config.hpp"
#include "crossflow/experiments.hpp"
#include "crossflow/sim.hpp"

namespace {

using namespace crossflow;

constexpr int kExitConfig = 1;
constexpr int kExitUsage = 2;

std::string metrics_header() {
  return "controller,demand,seed,departure_arrival_pct,avg_queue_veh,max_queue_veh,"
         "avg_wait_s,max_wait_s,green_time_utilization,stability";
}

std::string metrics_row(std::string_view controller, double demand, std::uint64_t seed,
                        const sim::MetricsRecord& m) {
  using experiments::format_number;
  return fmt::format("{},{},{},{},{},{},{},{},{},{}", controller, format_number(demand), seed,
                     format_number(m.departure_arrival_pct), format_number(m.avg_queue_veh),
                     format_number(m.max_queue_veh), format_number(m.avg_wait_s),
                     format_number(m.max_wait_s), format_number(m.green_time_utilization),
                     m.stability);
}

struct RunFlags {
  std::string controller = "dt3p";
  double demand = 250.0;
  std::uint64_t seed = 1;
  int duration = 3600;
  std::string trace;
  std::string config;
  bool header = false;
};

int cmd_run(const RunFlags& flags) {
  sim::SimConfig config;
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in) throw sim::ConfigError("cannot open config " + flags.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw sim::ConfigError(std::string("malformed JSON: ") + e.what());
    }
    config.controller.fixed_plan = baseline::FixedTimePlan::standard(
        j.contains("sim") && j["sim"].contains("full_cycle_s")
            ? j["sim"]["full_cycle_s"].get<double>()
            : config.full_cycle_s);
    apply_run_overrides(j, config);
  }
  config.controller.kind = parse_controller_kind(flags.controller);
  config.demand_veh_per_hour_per_lane = flags.demand;
  config.seed = flags.seed;
  config.duration_s = flags.duration;

  std::ofstream trace;
  sim::RunOptions options;
  if (!flags.trace.empty()) {
    trace.open(flags.trace, std::ios::binary | std::ios::trunc);
    if (!trace) throw sim::ConfigError("cannot write trace " + flags.trace);
    options.detection_trace = &trace;
  }
  const sim::RunResult result = sim::simulate(config, options);
  if (flags.header) std::cout << metrics_header() << "\n";
  std::cout << metrics_row(to_string(config.controller.kind), flags.demand, flags.seed,
                           result.metrics)
            << "\n";
  return 0;
}

struct ExperimentFlags {
  std::string config;
  int jobs = 1;
  std::string output;
};

void print_summary(const experiments::GridReport& report) {
  std::cout << fmt::format("{:<11} {:<5} {:>5} {:>9} {:>9} {:>9} {:>9} {:>9} {:>7} {:>4} {:>7}\n",
                           "level", "ctrl", "reps", "dep/arr%", "avgQ", "maxQ", "avgW", "maxW",
                           "util", "stab", "overall");
  for (const auto& level : report.levels) {
    for (std::size_t c = 0; c < level.cells.size(); ++c) {
      const auto& cell = level.cells[c];
      const auto& m = cell.mean;
      const double overall = level.ranking.overall.empty() ? 0.0 : level.ranking.overall[c];
      std::cout << fmt::format(
          "{:<11} {:<5} {:>5} {:>9.2f} {:>9.2f} {:>9.1f} {:>9.1f} {:>9.1f} {:>7.3f} {:>4} {:>7.1f}\n",
          level.level.name, cell.controller, cell.replications, m.departure_arrival_pct,
          m.avg_queue_veh, m.max_queue_veh, m.avg_wait_s, m.max_wait_s,
          m.green_time_utilization, m.stability, overall);
    }
  }
}

int cmd_experiment(const ExperimentFlags& flags) {
  const GridConfigFile file = load_grid_config(flags.config);
  std::string output = flags.output;
  if (output.empty()) {
    if (const char* env = std::getenv("CROSSFLOW_OUTPUT_DIR"); env && *env) output = env;
  }
  if (output.empty()) output = file.output_dir.value_or("crossflow-report");

  const experiments::GridReport report = experiments::run_grid(file.grid, flags.jobs);
  experiments::write_report(report, file.grid, output);
  print_summary(report);
  std::cout << fmt::format("{} runs written to {}\n", report.runs, output);
  if (!report.complete) {
    std::cerr << "crossflow: experiment incomplete: " << report.error << "\n";
    return kExitConfig;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signalized-intersection controller simulator"};
  app.require_subcommand(1);

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Simulate one replication and print its metrics row");
  run_cmd->add_option("--controller", run.controller, "bm1 | bm2 | dt3p")
      ->check([](const std::string& v) {
        try {
          parse_controller_kind(v);
          return std::string{};
        } catch (const std::invalid_argument&) {
          return "unknown controller: " + v;
        }
      });
  run_cmd->add_option("--demand", run.demand, "Arrival rate, veh/h/lane")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--seed", run.seed, "Replication seed");
  run_cmd->add_option("--duration", run.duration, "Simulated seconds")->check(CLI::PositiveNumber);
  run_cmd->add_option("--trace", run.trace, "Write the per-step detection trace CSV here");
  run_cmd->add_option("--config", run.config, "JSON file with parameter overrides")
      ->check(CLI::ExistingFile);
  run_cmd->add_flag("--header", run.header, "Print the CSV header line first");

  ExperimentFlags exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a controller x demand grid");
  exp_cmd->add_option("--config", exp.config, "Grid configuration (JSON)")->required();
  exp_cmd->add_option("--jobs", exp.jobs, "Worker threads")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--output", exp.output,
                      "Report directory (default: $CROSSFLOW_OUTPUT_DIR, then config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "crossflow: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    return cmd_experiment(exp);
  } catch (const std::exception& e) {
    std::cerr << "crossflow: " << e.what() << "\n";
    return kExitConfig;
  }
}
