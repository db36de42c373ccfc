#include "crossflow/config.hpp"

#include <fstream>

namespace crossflow {

using nlohmann::json;
using sim::ConfigError;

namespace {

template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for \"") + key + "\"");
  }
}

void apply_weights(const json& j, dt3p::LoadWeights& w) {
  if (!j.is_object()) throw ConfigError("\"load_weights\" must be an object");
  w.occupancy = field(j, "occupancy", w.occupancy);
  w.wait = field(j, "wait", w.wait);
  w.priority = field(j, "priority", w.priority);
  w.back_road = field(j, "back_road", w.back_road);
  w.next_road = field(j, "next_road", w.next_road);
  w.wait_norm_s = field(j, "wait_norm_s", w.wait_norm_s);
}

void apply_bm2(const json& j, baseline::ActuatedParams& p) {
  if (!j.is_object()) throw ConfigError("\"bm2\" must be an object");
  p.min_green_s = field(j, "min_green_s", p.min_green_s);
  p.extension_s = field(j, "extension_s", p.extension_s);
  p.max_green_s = field(j, "max_green_s", p.max_green_s);
  p.skip_empty_phases = field(j, "skip_empty_phases", p.skip_empty_phases);
}

void apply_controller_params(const json& j, ControllerSpec& spec) {
  if (j.contains("load_weights")) apply_weights(j["load_weights"], spec.weights);
  if (j.contains("bm1_durations_s")) {
    const auto durations = field(j, "bm1_durations_s", std::vector<double>{});
    if (durations.size() != spec.fixed_plan.phase_sequence.size()) {
      throw ConfigError("\"bm1_durations_s\" needs one entry per phase (" +
                        std::to_string(spec.fixed_plan.phase_sequence.size()) + ")");
    }
    spec.fixed_plan.phase_durations_s = durations;
  }
  if (j.contains("bm2")) apply_bm2(j["bm2"], spec.actuated);
}

void apply_sim(const json& j, sim::SimConfig& c) {
  if (!j.is_object()) throw ConfigError("\"sim\" must be an object");
  c.step_s = field(j, "step_s", c.step_s);
  c.saturation_headway_s = field(j, "saturation_headway_s", c.saturation_headway_s);
  c.startup_lost_time_s = field(j, "startup_lost_time_s", c.startup_lost_time_s);
  c.full_cycle_s = field(j, "full_cycle_s", c.full_cycle_s);
  c.min_green_s = field(j, "min_green_s", c.min_green_s);
}

ControllerKind kind_of(const std::string& name) {
  try {
    return parse_controller_kind(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

void apply_run_overrides(const json& j, sim::SimConfig& config) {
  if (!j.is_object()) throw ConfigError("configuration root must be an object");
  apply_controller_params(j, config.controller);
  if (j.contains("sim")) apply_sim(j["sim"], config);
  config.duration_s = field(j, "duration_s", config.duration_s);
}

GridConfigFile parse_grid_config(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration root must be an object");
  GridConfigFile file;
  experiments::GridConfig& grid = file.grid;

  ControllerSpec shared;
  shared.fixed_plan = baseline::FixedTimePlan::standard(
      j.contains("sim") ? field(j["sim"], "full_cycle_s", grid.sim.full_cycle_s)
                        : grid.sim.full_cycle_s);
  apply_controller_params(j, shared);

  if (!j.contains("controllers") || !j["controllers"].is_array() || j["controllers"].empty()) {
    throw ConfigError("\"controllers\" must be a non-empty array");
  }
  for (const auto& entry : j["controllers"]) {
    ControllerSpec spec = shared;
    if (entry.is_string()) {
      spec.kind = kind_of(entry.get<std::string>());
    } else if (entry.is_object() && entry.contains("name") && entry["name"].is_string()) {
      spec.kind = kind_of(entry["name"].get<std::string>());
      apply_controller_params(entry, spec);
    } else {
      throw ConfigError("controller entries must be a name or an object with \"name\"");
    }
    grid.controllers.push_back(spec);
  }

  if (j.contains("demand_levels")) {
    if (!j["demand_levels"].is_array()) throw ConfigError("\"demand_levels\" must be an array");
    grid.demand_levels.clear();
    for (const auto& entry : j["demand_levels"]) {
      if (entry.is_string()) {
        try {
          grid.demand_levels.push_back(experiments::demand_level(entry.get<std::string>()));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      } else if (entry.is_object()) {
        grid.demand_levels.push_back({field(entry, "name", std::string("custom")),
                                      field(entry, "rate", -1.0)});
      } else {
        throw ConfigError("demand level entries must be a name or {name, rate}");
      }
    }
  }

  if (j.contains("replications")) {
    const json& r = j["replications"];
    if (r.is_string() && r.get<std::string>() == "paper") {
      grid.replications.paper = true;
    } else if (r.is_number_integer()) {
      grid.replications.fixed = r.get<int>();
    } else if (r.is_object() && r.contains("fixed")) {
      grid.replications.fixed = field(r, "fixed", 0);
    } else {
      throw ConfigError("\"replications\" must be \"paper\", an integer or {\"fixed\": k}");
    }
  }

  grid.seed_base = field(j, "seed_base", grid.seed_base);
  grid.sim.duration_s = field(j, "duration_s", grid.sim.duration_s);
  if (j.contains("sim")) apply_sim(j["sim"], grid.sim);
  if (j.contains("output_dir")) file.output_dir = field(j, "output_dir", std::string{});

  grid.validate();
  return file;
}

GridConfigFile load_grid_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return parse_grid_config(j);
}

nlohmann::ordered_json config_to_json(const experiments::GridConfig& config) {
  nlohmann::ordered_json j;
  auto controllers = nlohmann::ordered_json::array();
  for (const auto& spec : config.controllers) {
    nlohmann::ordered_json c;
    c["name"] = to_string(spec.kind);
    const auto& w = spec.weights;
    c["load_weights"] = {{"occupancy", w.occupancy}, {"wait", w.wait},
                         {"priority", w.priority},   {"back_road", w.back_road},
                         {"next_road", w.next_road}, {"wait_norm_s", w.wait_norm_s}};
    c["bm1_durations_s"] = spec.fixed_plan.phase_durations_s;
    const auto& a = spec.actuated;
    c["bm2"] = {{"min_green_s", a.min_green_s},
                {"extension_s", a.extension_s},
                {"max_green_s", a.max_green_s},
                {"skip_empty_phases", a.skip_empty_phases}};
    controllers.push_back(c);
  }
  j["controllers"] = controllers;
  auto levels = nlohmann::ordered_json::array();
  for (const auto& level : config.demand_levels) {
    levels.push_back({{"name", level.name}, {"rate", level.rate_veh_per_hour_per_lane}});
  }
  j["demand_levels"] = levels;
  j["duration_s"] = config.sim.duration_s;
  j["seed_base"] = config.seed_base;
  if (config.replications.paper) {
    j["replications"] = "paper";
  } else {
    j["replications"] = {{"fixed", config.replications.fixed}};
  }
  j["sim"] = {{"step_s", config.sim.step_s},
              {"saturation_headway_s", config.sim.saturation_headway_s},
              {"startup_lost_time_s", config.sim.startup_lost_time_s},
              {"full_cycle_s", config.sim.full_cycle_s},
              {"min_green_s", config.sim.min_green_s}};
  return j;
}

}  // namespace crossflow
