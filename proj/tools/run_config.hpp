#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "warpdemo/campaign.hpp"
#include "warpdemo/evaluation.hpp"

namespace warpdemo::cli {

/// Everything that determines a command's output. The output directory and the
/// job count are deliberately absent: neither changes a single output byte.
struct RunConfig {
  std::string command;
  std::string demo;
  std::optional<TaskKind> task;  // unset: the demo's own task
  std::uint64_t seed = 0;

  std::size_t count = 25;
  std::size_t attempt_cap = 0;

  ReplayOptions replay;
  EnsembleConfig ensemble;
  TrackerConfig tracker;
  DisturbanceConfig disturbance;

  std::size_t episodes = 200;
  std::vector<double> betas{0.25, 0.5, 1.0};
  std::vector<std::string> cells{"all"};  // baseline, reset_only, dynamic_k, combined or all
  int steps_per_waypoint = 20;
  int extra_steps = 200;

  std::vector<double> cutoffs{0.01, 0.02, 0.03, 0.05, 0.1, 0.2, 0.5};

  bool identity = false;    // replay: the demo's own scene instead of a sampled one
  std::size_t attempt = 0;  // replay: campaign attempt index to reproduce
  bool diagnostics = false; // ensemble-eval: also write the per-step ensembler stream

  void validate() const;
};

class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const RunConfig& c);

/// Strict: unknown keys and wrong types are InvalidInput.
RunConfig from_json(const nlohmann::json& j);

/// Accepts a bare run config or any manifest/report that embeds one under "config".
nlohmann::json config_from_file(const std::string& path);

CampaignConfig campaign_config(const RunConfig& c, TaskKind task);
ClosedLoopConfig closed_loop_config(const RunConfig& c, TaskKind task);
std::vector<EvalCell> selected_cells(const RunConfig& c);

}  // namespace warpdemo::cli
