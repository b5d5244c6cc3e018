#include "run_config.hpp"

#include <algorithm>
#include <filesystem>
#include <initializer_list>
#include <set>

#include "warpdemo/dataset_io.hpp"

namespace warpdemo::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kCellKinds = {"all", "baseline", "reset_only", "dynamic_k", "combined"};

void expect_object(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw InvalidInput(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; })) {
      throw InvalidInput(where + ": unknown key '" + k + "'");
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(where + "." + key + ": wrong type");
  }
}

json workspace_json(const Workspace& w) {
  return {{"side", w.side},
          {"goal_z_min", w.goal_z_min},
          {"goal_z_max", w.goal_z_max},
          {"block_size", w.block_size},
          {"g_max", w.g_max}};
}

void read_workspace(const json& j, Workspace& w) {
  expect_object(j, "workspace", {"side", "goal_z_min", "goal_z_max", "block_size", "g_max"});
  read(j, "side", w.side, "workspace");
  read(j, "goal_z_min", w.goal_z_min, "workspace");
  read(j, "goal_z_max", w.goal_z_max, "workspace");
  read(j, "block_size", w.block_size, "workspace");
  read(j, "g_max", w.g_max, "workspace");
}

void read_controller(const json& j, ControllerConfig& c) {
  expect_object(j, "controller",
                {"gain", "max_speed", "max_gripper_speed", "dt", "waypoint_advance_radius",
                 "gripper_advance_tolerance", "waypoint_timeout", "settle_time"});
  read(j, "gain", c.gain, "controller");
  read(j, "max_speed", c.max_speed, "controller");
  read(j, "max_gripper_speed", c.max_gripper_speed, "controller");
  read(j, "dt", c.dt, "controller");
  read(j, "waypoint_advance_radius", c.waypoint_advance_radius, "controller");
  read(j, "gripper_advance_tolerance", c.gripper_advance_tolerance, "controller");
  read(j, "waypoint_timeout", c.waypoint_timeout, "controller");
  read(j, "settle_time", c.settle_time, "controller");
}

void read_grasp(const json& j, GraspModel& g) {
  expect_object(j, "grasp", {"capture_radius_xy", "capture_radius_z", "block_size"});
  read(j, "capture_radius_xy", g.capture_radius_xy, "grasp");
  read(j, "capture_radius_z", g.capture_radius_z, "grasp");
  read(j, "block_size", g.block_size, "grasp");
}

void read_success(const json& j, SuccessSpec& s) {
  expect_object(j, "success", {"push", "pick_place", "stack"});
  read(j, "push", s.push, "success");
  read(j, "pick_place", s.pick_place, "success");
  read(j, "stack", s.stack, "success");
}

void read_ensemble(const json& j, EnsembleConfig& e) {
  expect_object(j, "ensemble",
                {"mode", "beta", "k_const", "k_cutoff", "chunk_len", "replay_n", "warmup_steps",
                 "clear_after_suspend"});
  if (j.contains("mode")) {
    std::string name;
    read(j, "mode", name, "ensemble");
    const auto m = parse_ensemble_mode(name);
    if (!m) throw InvalidInput("ensemble.mode: unknown mode '" + name + "'");
    e.mode = *m;
  }
  read(j, "beta", e.beta, "ensemble");
  read(j, "k_const", e.k_const, "ensemble");
  read(j, "k_cutoff", e.k_cutoff, "ensemble");
  read(j, "chunk_len", e.chunk_len, "ensemble");
  read(j, "replay_n", e.replay_n, "ensemble");
  read(j, "warmup_steps", e.warmup_steps, "ensemble");
  read(j, "clear_after_suspend", e.clear_after_suspend, "ensemble");
}

}  // namespace

void RunConfig::validate() const {
  if (demo.empty()) throw InvalidInput("no demo file given (--demo)");
  replay.controller.validate();
  replay.grasp.validate();
  replay.success.validate();
  replay.workspace.validate();
  ensemble.validate();
  disturbance.validate();
  TrackerConfig t = tracker;
  t.chunk_len = ensemble.chunk_len;
  t.controller = replay.controller;
  t.validate();
  if (command == "augment" && count == 0) throw ConfigError("count must be at least 1");
  if (steps_per_waypoint < 1 || extra_steps < 0) throw ConfigError("episode budget must be positive");
  if (betas.empty()) throw ConfigError("at least one beta is required");
  for (double b : betas) {
    if (!(b > 0.0)) throw ConfigError("betas must be positive");
  }
  if (cells.empty()) throw ConfigError("at least one cell kind is required");
  for (const auto& c : cells) {
    if (!kCellKinds.contains(c)) throw ConfigError("unknown cell kind '" + c + "'");
  }
  if (command == "calibrate-cutoff" && cutoffs.empty()) throw ConfigError("at least one cutoff is required");
  for (double k : cutoffs) {
    if (!(k > 0.0)) throw ConfigError("cutoffs must be positive");
  }
}

json to_json(const RunConfig& c) {
  json j = {
      {"command", c.command},
      {"demo", c.demo},
      {"task", c.task ? json(std::string(to_string(*c.task))) : json(nullptr)},
      {"seed", c.seed},
      {"count", c.count},
      {"attempt_cap", c.attempt_cap},
      {"workspace", workspace_json(c.replay.workspace)},
      {"controller", controller_to_json(c.replay.controller)},
      {"grasp", grasp_to_json(c.replay.grasp)},
      {"success", {{"push", c.replay.success.push}, {"pick_place", c.replay.success.pick_place},
                   {"stack", c.replay.success.stack}}},
      {"ensemble", ensemble_config_to_json(c.ensemble)},
      {"tracker", {{"search_window", c.tracker.search_window}, {"gripper_weight", c.tracker.gripper_weight},
                   {"stall_steps", c.tracker.stall_steps}}},
      {"disturbance", disturbance_to_json(c.disturbance)},
      {"eval", {{"episodes", c.episodes}, {"betas", c.betas}, {"cells", c.cells},
                {"steps_per_waypoint", c.steps_per_waypoint}, {"extra_steps", c.extra_steps}}},
      {"cutoffs", c.cutoffs},
      {"identity", c.identity},
      {"attempt", c.attempt},
      {"diagnostics", c.diagnostics},
  };
  return j;
}

RunConfig from_json(const json& j) {
  expect_object(j, "config",
                {"command", "demo", "task", "seed", "count", "attempt_cap", "workspace", "controller", "grasp",
                 "success", "ensemble", "tracker", "disturbance", "eval", "cutoffs", "identity", "attempt", "diagnostics"});
  RunConfig c;
  read(j, "command", c.command, "config");
  read(j, "demo", c.demo, "config");
  if (j.contains("task") && !j.at("task").is_null()) {
    std::string name;
    read(j, "task", name, "config");
    c.task = parse_task_kind(name);
    if (!c.task) throw InvalidInput("unknown task '" + name + "'");
  }
  read(j, "seed", c.seed, "config");
  read(j, "count", c.count, "config");
  read(j, "attempt_cap", c.attempt_cap, "config");
  if (j.contains("workspace")) read_workspace(j.at("workspace"), c.replay.workspace);
  if (j.contains("controller")) read_controller(j.at("controller"), c.replay.controller);
  if (j.contains("grasp")) read_grasp(j.at("grasp"), c.replay.grasp);
  if (j.contains("success")) read_success(j.at("success"), c.replay.success);
  if (j.contains("ensemble")) read_ensemble(j.at("ensemble"), c.ensemble);
  if (j.contains("tracker")) {
    const auto& t = j.at("tracker");
    expect_object(t, "tracker", {"search_window", "gripper_weight", "stall_steps"});
    read(t, "search_window", c.tracker.search_window, "tracker");
    read(t, "gripper_weight", c.tracker.gripper_weight, "tracker");
    read(t, "stall_steps", c.tracker.stall_steps, "tracker");
  }
  if (j.contains("disturbance")) {
    const auto& d = j.at("disturbance");
    expect_object(d, "disturbance", {"latency", "bimodal_period", "bimodal_gap", "noise"});
    read(d, "latency", c.disturbance.latency, "disturbance");
    read(d, "bimodal_period", c.disturbance.bimodal_period, "disturbance");
    read(d, "bimodal_gap", c.disturbance.bimodal_gap, "disturbance");
    read(d, "noise", c.disturbance.noise, "disturbance");
  }
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    expect_object(e, "eval", {"episodes", "betas", "cells", "steps_per_waypoint", "extra_steps"});
    read(e, "episodes", c.episodes, "eval");
    read(e, "betas", c.betas, "eval");
    read(e, "cells", c.cells, "eval");
    read(e, "steps_per_waypoint", c.steps_per_waypoint, "eval");
    read(e, "extra_steps", c.extra_steps, "eval");
  }
  read(j, "cutoffs", c.cutoffs, "config");
  read(j, "identity", c.identity, "config");
  read(j, "attempt", c.attempt, "config");
  read(j, "diagnostics", c.diagnostics, "config");
  return c;
}

json config_from_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw InvalidInput("config file not found: " + path);
  json j;
  try {
    j = read_json_file(path);
  } catch (const json::exception& e) {
    throw InvalidInput("config file " + path + ": " + e.what());
  }
  if (j.is_object() && j.contains("config") && j.at("config").is_object()) return j.at("config");
  return j;
}

CampaignConfig campaign_config(const RunConfig& c, TaskKind task) {
  CampaignConfig cfg;
  cfg.task = task;
  cfg.count = c.count;
  cfg.attempt_cap = c.attempt_cap;
  cfg.seed = c.seed;
  cfg.replay = c.replay;
  return cfg;
}

ClosedLoopConfig closed_loop_config(const RunConfig& c, TaskKind task) {
  ClosedLoopConfig cfg;
  cfg.task = task;
  cfg.sim = c.replay;
  cfg.tracker = c.tracker;
  cfg.disturbance = c.disturbance;
  cfg.steps_per_waypoint = c.steps_per_waypoint;
  cfg.extra_steps = c.extra_steps;
  return cfg;
}

std::vector<EvalCell> selected_cells(const RunConfig& c) {
  const auto all = ablation_matrix(c.ensemble, c.betas);
  const bool everything = std::find(c.cells.begin(), c.cells.end(), "all") != c.cells.end();
  std::vector<EvalCell> out;
  for (const auto& cell : all) {
    const std::string kind = cell.name.substr(0, cell.name.find('@'));
    if (everything || std::find(c.cells.begin(), c.cells.end(), kind) != c.cells.end()) out.push_back(cell);
  }
  return out;
}

}  // namespace warpdemo::cli
