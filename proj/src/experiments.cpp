#include "crossflow/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "crossflow/config.hpp"

namespace crossflow::experiments {

int sample_size(long population, const ConfidenceParams& p) {
  if (population < 1) throw std::invalid_argument("population must be >= 1");
  const double n0 = std::pow(p.z * p.sigma / p.margin, 2);
  const auto n = static_cast<double>(population);
  return static_cast<int>(std::lround(n0 * n / (n0 + n - 1.0)));
}

const std::vector<DemandLevel>& standard_demand_levels() {
  static const std::vector<DemandLevel> levels = {
      {"very-small", 250.0}, {"small", 375.0},       {"medium", 750.0},
      {"large", 1125.0},     {"very-large", 1300.0},
  };
  return levels;
}

DemandLevel demand_level(std::string_view name) {
  for (const auto& level : standard_demand_levels()) {
    if (level.name == name) return level;
  }
  throw std::invalid_argument("unknown demand level: " + std::string(name));
}

std::array<double, kMeasuredFactors> measured_factors(const sim::MetricsRecord& m) {
  return {m.departure_arrival_pct, m.avg_queue_veh, m.max_queue_veh,
          m.avg_wait_s,            m.max_wait_s,    m.green_time_utilization};
}

RankTable rank_methods(const std::vector<std::vector<double>>& values,
                       const std::vector<Better>& directions, const std::vector<int>& stability) {
  if (values.size() != directions.size()) {
    throw DimensionMismatch("one direction per factor required");
  }
  const std::size_t methods = stability.size();
  if (methods < 2) throw DimensionMismatch("at least two methods are needed");
  for (const auto& row : values) {
    if (row.size() != methods) throw DimensionMismatch("ragged metric matrix");
  }

  std::vector<std::size_t> ranked;
  for (std::size_t j = 0; j < methods; ++j) {
    if (stability[j] != 0) ranked.push_back(j);
  }

  RankTable table;
  table.stability = stability;
  table.points.assign(values.size(), std::vector<double>(methods, 0.0));
  for (std::size_t f = 0; f < values.size(); ++f) {
    const auto& row = values[f];
    // Worst first, so position k (0-based) earns k + 1 points.
    std::vector<std::size_t> order = ranked;
    const bool higher = directions[f] == Better::Higher;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return higher ? row[a] < row[b] : row[a] > row[b];
    });
    for (std::size_t begin = 0; begin < order.size();) {
      std::size_t end = begin + 1;
      while (end < order.size() && row[order[end]] == row[order[begin]]) ++end;
      const double shared = 0.5 * static_cast<double>(begin + 1 + end);
      for (std::size_t k = begin; k < end; ++k) table.points[f][order[k]] = shared;
      begin = end;
    }
  }

  table.overall.assign(methods, 0.0);
  for (std::size_t j = 0; j < methods; ++j) {
    double sum = 0.0;
    for (const auto& row : table.points) sum += row[j];
    table.overall[j] = stability[j] * sum;
  }
  return table;
}

int ReplicationPolicy::count(const DemandLevel& level) const {
  return paper ? sample_size(std::lround(level.rate_veh_per_hour_per_lane)) : fixed;
}

void GridConfig::validate() const {
  if (controllers.empty()) throw sim::ConfigError("no controllers configured");
  if (demand_levels.empty()) throw sim::ConfigError("no demand levels configured");
  if (!replications.paper && replications.fixed < 1) {
    throw sim::ConfigError("fixed replication count must be >= 1");
  }
  for (const auto& level : demand_levels) {
    if (!(level.rate_veh_per_hour_per_lane >= 0.0)) {
      throw sim::ConfigError("demand level " + level.name + " has a negative rate");
    }
    if (level.rate_veh_per_hour_per_lane < 0.5 && replications.paper) {
      throw sim::ConfigError("paper replications need a demand of at least 1 veh/h");
    }
  }
  for (const auto& spec : controllers) {
    sim::SimConfig probe = sim;
    probe.controller = spec;
    probe.validate();
  }
  sim.validate();
}

CellResult aggregate(std::string controller, const std::vector<sim::MetricsRecord>& reps) {
  CellResult cell;
  cell.controller = std::move(controller);
  cell.replications = static_cast<int>(reps.size());
  if (reps.empty()) return cell;

  for (std::size_t f = 0; f < kMeasuredFactors; ++f) {
    FactorSummary& s = cell.spread[f];
    s.min = s.max = measured_factors(reps.front())[f];
    double sum = 0.0;
    for (const auto& r : reps) {
      const double v = measured_factors(r)[f];
      sum += v;
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
    }
    s.mean = std::clamp(sum / static_cast<double>(reps.size()), s.min, s.max);
  }
  sim::MetricsRecord& m = cell.mean;
  m.departure_arrival_pct = cell.spread[0].mean;
  m.avg_queue_veh = cell.spread[1].mean;
  m.max_queue_veh = cell.spread[2].mean;
  m.avg_wait_s = cell.spread[3].mean;
  m.max_wait_s = cell.spread[4].mean;
  m.green_time_utilization = cell.spread[5].mean;
  m.stability = std::all_of(reps.begin(), reps.end(), [](const auto& r) { return r.stability == 1; })
                    ? 1
                    : 0;
  return cell;
}

namespace {

struct Task {
  std::size_t level;
  std::size_t controller;
  int replication;
};

struct TaskOutcome {
  sim::MetricsRecord metrics;
  sim::RunDiagnostics diagnostics;
  bool ok = false;
  std::string error;
};

}  // namespace

GridReport run_grid(const GridConfig& config, int jobs) {
  config.validate();
  std::vector<Task> tasks;
  for (std::size_t l = 0; l < config.demand_levels.size(); ++l) {
    const int reps = config.replications.count(config.demand_levels[l]);
    for (std::size_t c = 0; c < config.controllers.size(); ++c) {
      for (int r = 0; r < reps; ++r) tasks.push_back({l, c, r});
    }
  }

  std::vector<TaskOutcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size() && !failed; i = next++) {
      const Task& task = tasks[i];
      sim::SimConfig sc = config.sim;
      sc.demand_veh_per_hour_per_lane = config.demand_levels[task.level].rate_veh_per_hour_per_lane;
      sc.seed = config.seed_base + static_cast<std::uint64_t>(task.replication);
      sc.controller = config.controllers[task.controller];
      try {
        sim::RunResult r = sim::simulate(sc);
        outcomes[i].metrics = r.metrics;
        outcomes[i].diagnostics = r.diagnostics;
        outcomes[i].ok = true;
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
        failed = true;
      }
    }
  };
  const int threads = std::max(1, jobs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  GridReport report;
  std::size_t cursor = 0;
  for (std::size_t l = 0; l < config.demand_levels.size(); ++l) {
    LevelResult level{config.demand_levels[l], {}, {}};
    bool level_ok = true;
    for (std::size_t c = 0; c < config.controllers.size(); ++c) {
      std::vector<sim::MetricsRecord> reps;
      for (; cursor < tasks.size() && tasks[cursor].level == l && tasks[cursor].controller == c;
           ++cursor) {
        const TaskOutcome& o = outcomes[cursor];
        if (!o.ok) {
          level_ok = false;
          if (!o.error.empty() && report.error.empty()) report.error = o.error;
          continue;
        }
        reps.push_back(o.metrics);
        ++report.runs;
        report.conservation_violations += o.diagnostics.conservation_violations;
        report.conflict_violations += o.diagnostics.conflict_violations;
        report.detection_violations += o.diagnostics.detection_violations;
      }
      level.cells.push_back(
          aggregate(std::string(to_string(config.controllers[c].kind)), reps));
    }
    if (!level_ok) {
      report.complete = false;
      continue;
    }
    if (level.cells.size() >= 2) {
      std::vector<std::vector<double>> values(kMeasuredFactors,
                                              std::vector<double>(level.cells.size()));
      std::vector<int> stability;
      for (std::size_t c = 0; c < level.cells.size(); ++c) {
        const auto f = measured_factors(level.cells[c].mean);
        for (std::size_t k = 0; k < kMeasuredFactors; ++k) values[k][c] = f[k];
        stability.push_back(level.cells[c].mean.stability);
      }
      level.ranking = rank_methods(
          values, std::vector<Better>(kFactorDirections.begin(), kFactorDirections.end()),
          stability);
    }
    report.levels.push_back(std::move(level));
  }
  return report;
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop negative zero
  return fmt::format("{:.6g}", v);
}

std::string level_table_csv(const LevelResult& level) {
  std::string out = "factor";
  for (const auto& cell : level.cells) out += "," + cell.controller;
  out += "\n";
  for (std::size_t f = 0; f < kMeasuredFactors; ++f) {
    out += kFactorNames[f];
    for (const auto& cell : level.cells) out += "," + format_number(measured_factors(cell.mean)[f]);
    out += "\n";
  }
  out += "stability";
  for (const auto& cell : level.cells) out += "," + std::to_string(cell.mean.stability);
  out += "\n";
  if (!level.ranking.overall.empty()) {
    out += "overall";
    for (double v : level.ranking.overall) out += "," + format_number(v);
    out += "\n";
  }
  out += "replications";
  for (const auto& cell : level.cells) out += "," + std::to_string(cell.replications);
  out += "\n";
  return out;
}

std::string ranking_csv(const GridReport& report) {
  std::string out = "level,controller";
  for (auto name : kFactorNames) out += fmt::format(",{}", name);
  out += ",stability,overall\n";
  for (const auto& level : report.levels) {
    if (level.ranking.overall.empty()) continue;
    for (std::size_t c = 0; c < level.cells.size(); ++c) {
      out += level.level.name + "," + level.cells[c].controller;
      for (std::size_t f = 0; f < kMeasuredFactors; ++f) {
        out += "," + format_number(level.ranking.points[f][c]);
      }
      out += "," + std::to_string(level.ranking.stability[c]) + "," +
             format_number(level.ranking.overall[c]) + "\n";
    }
  }
  return out;
}

std::string overall_scores_csv(const GridReport& report) {
  std::string out = "level,demand_veh_per_hour_per_lane";
  if (!report.levels.empty()) {
    for (const auto& cell : report.levels.front().cells) out += "," + cell.controller;
  }
  out += "\n";
  for (const auto& level : report.levels) {
    out += level.level.name + "," + format_number(level.level.rate_veh_per_hour_per_lane);
    for (std::size_t c = 0; c < level.cells.size(); ++c) {
      const double v = level.ranking.overall.empty() ? 0.0 : level.ranking.overall[c];
      out += "," + format_number(v);
    }
    out += "\n";
  }
  return out;
}

std::string report_json(const GridReport& report, const GridConfig& config) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["complete"] = report.complete;
  if (!report.complete) j["error"] = report.error;
  j["seed_base"] = config.seed_base;
  j["config"] = config_to_json(config);
  j["runs"] = report.runs;
  ordered_json levels = ordered_json::array();
  for (const auto& level : report.levels) {
    ordered_json lj;
    lj["level"] = level.level.name;
    lj["demand_veh_per_hour_per_lane"] = level.level.rate_veh_per_hour_per_lane;
    ordered_json cells = ordered_json::array();
    for (std::size_t c = 0; c < level.cells.size(); ++c) {
      const auto& cell = level.cells[c];
      ordered_json cj;
      cj["controller"] = cell.controller;
      cj["replications"] = cell.replications;
      const auto f = measured_factors(cell.mean);
      for (std::size_t k = 0; k < kMeasuredFactors; ++k) {
        cj[std::string(kFactorNames[k])] = f[k];
      }
      cj["stability"] = cell.mean.stability;
      if (!level.ranking.overall.empty()) {
        ordered_json pts = ordered_json::array();
        for (std::size_t k = 0; k < kMeasuredFactors; ++k) {
          pts.push_back(level.ranking.points[k][c]);
        }
        cj["points"] = pts;
        cj["overall"] = level.ranking.overall[c];
      }
      cells.push_back(cj);
    }
    lj["controllers"] = cells;
    levels.push_back(lj);
  }
  j["levels"] = levels;
  return j.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace

void write_report(const GridReport& report, const GridConfig& config,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& level : report.levels) {
    write_file(dir / ("level_" + level.level.name + ".csv"), level_table_csv(level));
  }
  write_file(dir / "ranking.csv", ranking_csv(report));
  write_file(dir / "overall_scores.csv", overall_scores_csv(report));
  write_file(dir / "report.json", report_json(report, config));
  const auto marker = dir / "INCOMPLETE";
  if (report.complete) {
    std::filesystem::remove(marker);
  } else {
    write_file(marker, report.error + "\n");
  }
}

}  // namespace crossflow::experiments
