#include "warpdemo/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>

#include <omp.h>

#include "warpdemo/rng.hpp"

namespace warpdemo {

void ClosedLoopConfig::validate() const {
  sim.controller.validate();
  sim.grasp.validate();
  sim.success.validate();
  sim.workspace.validate();
  tracker.validate();
  disturbance.validate();
  if (steps_per_waypoint < 1 || extra_steps < 0) throw ConfigError("episode budget must be positive");
}

std::vector<EvalCell> ablation_matrix(const EnsembleConfig& base, const std::vector<double>& betas) {
  std::vector<EvalCell> cells;
  auto make = [&](EnsembleMode mode, double beta, std::string name) {
    EnsembleConfig c = base;
    c.mode = mode;
    c.beta = beta;
    cells.push_back({std::move(name), c});
  };
  make(EnsembleMode::Baseline, base.beta, "baseline");
  make(EnsembleMode::ResetOnly, base.beta, "reset_only");
  for (double b : betas) {
    char name[64];
    std::snprintf(name, sizeof name, "dynamic_k@%g", b);
    make(EnsembleMode::DynamicK, b, name);
  }
  for (double b : betas) {
    char name[64];
    std::snprintf(name, sizeof name, "combined@%g", b);
    make(EnsembleMode::Combined, b, name);
  }
  return cells;
}

EpisodeOutcome run_closed_loop_episode(const DemoTrajectory& demo, const ClosedLoopConfig& cfg,
                                       const EnsembleConfig& ensemble, std::uint64_t seed,
                                       const std::function<void(const EnsembleDiagnostics&)>& on_step) {
  EpisodeOutcome result;
  result.seed = seed;

  const Scene scene = sample_scene(cfg.task, cfg.sim.workspace, seed);
  const auto anchors = anchors_for_scene(cfg.task, demo, scene);
  const auto aug = augment_segmentwise(demo, anchors);
  const auto& ref = aug.trajectory.waypoints;

  const auto& ctrl = cfg.sim.controller;
  TrackerConfig tracker = cfg.tracker;
  tracker.chunk_len = ensemble.chunk_len;
  tracker.controller = ctrl;
  ScriptedPolicy policy(ref, tracker, cfg.disturbance, derive_seed(seed, 0x6e6f697365ULL));
  TemporalEnsembler ens(ensemble);

  const long long budget = static_cast<long long>(cfg.steps_per_waypoint) * static_cast<long long>(ref.size()) +
                           cfg.extra_steps;
  const int settle = std::max(1, ctrl.settle_steps());
  const Waypoint& final_wp = ref.back();

  SimState state = initial_state(scene, cfg.sim.workspace);
  int settled = 0;
  long long t = 0;
  for (; t < budget; ++t) {
    ens.submit(policy.chunk({state.ee_pos, state.gripper}, t));
    const EnsembleOutput out = ens.act(t);
    if (out.diag.kind == StepKind::Triggered) ++result.triggers;
    if (on_step) on_step(out.diag);
    state = step(state, out.action, ctrl, cfg.sim.grasp);

    const bool at_end = policy.cursor() + 1 == ref.size() &&
                        (state.ee_pos - final_wp.position).norm() <= ctrl.waypoint_advance_radius &&
                        std::abs(state.gripper - final_wp.gripper) <= ctrl.gripper_advance_tolerance;
    settled = at_end ? settled + 1 : 0;
    if (settled >= settle) {
      ++t;
      break;
    }
  }
  result.steps = static_cast<std::size_t>(t);
  result.success = success(cfg.task, state, scene, cfg.sim.success);
  return result;
}

Interval wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::size_t CellResult::successes() const {
  std::size_t n = 0;
  for (const auto& e : episodes) n += e.success ? 1 : 0;
  return n;
}

std::size_t CellResult::triggers() const {
  std::size_t n = 0;
  for (const auto& e : episodes) n += e.triggers;
  return n;
}

double CellResult::rate() const {
  return episodes.empty() ? 0.0 : static_cast<double>(successes()) / static_cast<double>(episodes.size());
}

Interval CellResult::interval() const { return wilson_interval(successes(), episodes.size()); }

const CellResult* EvalReport::find(const std::string& name) const {
  for (const auto& c : cells) {
    if (c.cell.name == name) return &c;
  }
  return nullptr;
}

std::vector<std::uint64_t> episode_seeds(std::uint64_t base, std::size_t n) {
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t i = 0; i < n; ++i) seeds[i] = derive_seed(base, i);
  return seeds;
}

namespace {

EvalReport empty_report(const ClosedLoopConfig& cfg, const std::vector<EvalCell>& cells,
                        const std::vector<std::uint64_t>& seeds) {
  cfg.validate();
  for (const auto& c : cells) c.ensemble.validate();
  EvalReport report;
  report.task = cfg.task;
  report.seeds = seeds;
  for (const auto& c : cells) {
    report.cells.push_back({c, std::vector<EpisodeOutcome>(seeds.size())});
  }
  return report;
}

}  // namespace

EvalReport closed_loop_eval_serial(const DemoTrajectory& demo, const ClosedLoopConfig& cfg,
                                   const std::vector<EvalCell>& cells, const std::vector<std::uint64_t>& seeds) {
  EvalReport report = empty_report(cfg, cells, seeds);
  for (auto& cell : report.cells) {
    for (std::size_t e = 0; e < seeds.size(); ++e) {
      cell.episodes[e] = run_closed_loop_episode(demo, cfg, cell.cell.ensemble, seeds[e]);
    }
  }
  return report;
}

EvalReport closed_loop_eval(const DemoTrajectory& demo, const ClosedLoopConfig& cfg,
                            const std::vector<EvalCell>& cells, const std::vector<std::uint64_t>& seeds, int jobs) {
  EvalReport report = empty_report(cfg, cells, seeds);
  const std::size_t n_eps = seeds.size();
  const std::size_t total = report.cells.size() * n_eps;
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  std::vector<std::exception_ptr> errors(total);

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(total); ++k) {
    const std::size_t c = static_cast<std::size_t>(k) / n_eps;
    const std::size_t e = static_cast<std::size_t>(k) % n_eps;
    try {
      report.cells[c].episodes[e] = run_closed_loop_episode(demo, cfg, report.cells[c].cell.ensemble, seeds[e]);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    const auto ci = c.interval();
    cells.push_back({{"name", c.cell.name},
                     {"ensemble", ensemble_config_to_json(c.cell.ensemble)},
                     {"episodes", c.episodes.size()},
                     {"successes", c.successes()},
                     {"success_rate", c.rate()},
                     {"ci95", {ci.lo, ci.hi}},
                     {"suspension_triggers", c.triggers()}});
  }
  return {{"task", std::string(to_string(report.task))}, {"episodes_per_cell", report.seeds.size()},
          {"cells", std::move(cells)}};
}

std::string report_to_text(const EvalReport& report) {
  std::ostringstream os;
  os << "task: " << to_string(report.task) << "  episodes/cell: " << report.seeds.size() << '\n';
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %8s %10s %19s %9s\n", "cell", "success", "rate", "95% CI", "triggers");
  os << line;
  for (const auto& c : report.cells) {
    const auto ci = c.interval();
    std::snprintf(line, sizeof line, "%-18s %4zu/%-4zu %9.1f%% [%6.1f%%, %6.1f%%] %9zu\n", c.cell.name.c_str(),
                  c.successes(), c.episodes.size(), 100.0 * c.rate(), 100.0 * ci.lo, 100.0 * ci.hi, c.triggers());
    os << line;
  }
  return os.str();
}

}  // namespace warpdemo
