#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "warpdemo/ensembler.hpp"
#include "warpdemo/policy.hpp"
#include "warpdemo/sim.hpp"
#include "warpdemo/tasks.hpp"

namespace warpdemo {

struct ClosedLoopConfig {
  TaskKind task = TaskKind::PickPlace;
  ReplayOptions sim;
  TrackerConfig tracker;
  DisturbanceConfig disturbance;
  // Episode budget: steps_per_waypoint * reference length + extra_steps.
  int steps_per_waypoint = 20;
  int extra_steps = 200;

  void validate() const;
};

/// One column of the ablation table.
struct EvalCell {
  std::string name;
  EnsembleConfig ensemble;
};

/// Baseline, ResetOnly, then DynamicK and Combined for each beta.
std::vector<EvalCell> ablation_matrix(const EnsembleConfig& base, const std::vector<double>& betas);

struct EpisodeOutcome {
  std::uint64_t seed = 0;
  bool success = false;
  std::size_t steps = 0;
  std::size_t triggers = 0;
};

/// Scripted policy + ensembler + simulator on the scene sampled from `seed`.
/// `on_step`, when set, receives every ensembler diagnostic.
EpisodeOutcome run_closed_loop_episode(const DemoTrajectory& demo, const ClosedLoopConfig& cfg,
                                       const EnsembleConfig& ensemble, std::uint64_t seed,
                                       const std::function<void(const EnsembleDiagnostics&)>& on_step = {});

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval at 95%.
Interval wilson_interval(std::size_t successes, std::size_t trials);

struct CellResult {
  EvalCell cell;
  std::vector<EpisodeOutcome> episodes;

  std::size_t successes() const;
  std::size_t triggers() const;
  double rate() const;
  Interval interval() const;
};

struct EvalReport {
  TaskKind task = TaskKind::PickPlace;
  std::vector<std::uint64_t> seeds;
  std::vector<CellResult> cells;

  const CellResult* find(const std::string& name) const;
};

/// Episode seeds 0..n-1 derived from a base seed.
std::vector<std::uint64_t> episode_seeds(std::uint64_t base, std::size_t n);

/// Reference implementation: cells and episodes in order, one at a time.
EvalReport closed_loop_eval_serial(const DemoTrajectory& demo, const ClosedLoopConfig& cfg,
                                   const std::vector<EvalCell>& cells, const std::vector<std::uint64_t>& seeds);

/// OpenMP over (cell, episode) pairs; identical output to the serial version.
EvalReport closed_loop_eval(const DemoTrajectory& demo, const ClosedLoopConfig& cfg,
                            const std::vector<EvalCell>& cells, const std::vector<std::uint64_t>& seeds,
                            int jobs = 0);

nlohmann::json report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);

}  // namespace warpdemo
