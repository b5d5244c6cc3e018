// warpdemo-cli: demo augmentation campaigns, ensembler evaluation and dataset statistics.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "run_config.hpp"
#include "warpdemo/campaign.hpp"
#include "warpdemo/dataset_io.hpp"
#include "warpdemo/evaluation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace warpdemo;
using warpdemo::cli::InvalidInput;
using warpdemo::cli::RunConfig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitPartial = 2;
constexpr const char* kOutEnv = "WARPDEMO_OUT";

// Flags as typed on the command line; unset ones leave the config untouched.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> out;
  int jobs = 0;

  std::optional<std::string> demo;
  std::optional<std::string> task;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
  std::optional<std::size_t> attempt_cap;
  std::optional<double> workspace_side;
  std::optional<double> gain;
  std::optional<double> max_speed;

  std::optional<std::size_t> episodes;
  std::optional<std::vector<double>> betas;
  std::optional<std::vector<std::string>> cells;
  std::optional<double> k_const;
  std::optional<double> k_cutoff;
  std::optional<std::size_t> chunk_len;
  bool no_clear = false;
  bool suite = false;
  std::optional<int> latency;
  std::optional<int> bimodal_period;
  std::optional<int> bimodal_gap;
  std::optional<double> noise;
  std::optional<int> steps_per_waypoint;
  std::optional<std::vector<double>> cutoffs;
  bool identity = false;
  std::optional<std::size_t> attempt;
  bool diagnostics = false;

  bool json_out = false;
  std::optional<std::string> dataset;
};

std::string dflt(const json& v) { return " (default " + v.dump() + ")"; }

void add_run_options(CLI::App& sub, Flags& f) {
  const RunConfig d;
  sub.add_option("--config", f.config, "Rerun from a manifest, report or bare config JSON; flags override it");
  sub.add_option("--out", f.out, std::string("Output directory (default $") + kOutEnv + "/<command>-<task>-seed<N>)");
  sub.add_option("--jobs", f.jobs, "Worker threads, 0 = OpenMP default")->check(CLI::NonNegativeNumber);
  sub.add_option("--demo", f.demo, "Reference demonstration JSON");
  sub.add_option("--task", f.task, "push | pick_place | stack (default: the demo's task)");
  sub.add_option("--seed", f.seed, "Base seed" + dflt(d.seed));
  sub.add_option("--workspace-side", f.workspace_side, "Table side length, m" + dflt(d.replay.workspace.side));
  sub.add_option("--gain", f.gain, "Controller gain, 1/s" + dflt(d.replay.controller.gain));
  sub.add_option("--max-speed", f.max_speed, "End-effector speed limit, m/s" + dflt(d.replay.controller.max_speed));
}

void add_eval_options(CLI::App& sub, Flags& f) {
  const RunConfig d;
  sub.add_option("--episodes", f.episodes, "Seeded episodes per cell" + dflt(d.episodes));
  sub.add_option("--beta", f.betas, "Beta values for the DynamicK and Combined cells" + dflt(d.betas));
  sub.add_option("--cells", f.cells, "Cell kinds: all, baseline, reset_only, dynamic_k, combined" + dflt(d.cells));
  sub.add_option("--k-const", f.k_const, "Fixed temperature for Baseline and warm-up" + dflt(d.ensemble.k_const));
  sub.add_option("--k-cutoff", f.k_cutoff, "Suspension threshold on k_p or k_g" + dflt(d.ensemble.k_cutoff));
  sub.add_option("--chunk-len", f.chunk_len, "Action chunk length" + dflt(d.ensemble.chunk_len));
  sub.add_flag("--no-clear-after-suspend", f.no_clear, "Keep the chunk buffer when a suspension ends");
  sub.add_flag("--suite", f.suite, "Disturbance suite: latency 3, bimodal period 2");
  sub.add_option("--latency", f.latency, "Observation latency, steps" + dflt(d.disturbance.latency));
  sub.add_option("--bimodal-period", f.bimodal_period,
                 "Chunks per hypothesis, 0 disables" + dflt(d.disturbance.bimodal_period));
  sub.add_option("--bimodal-gap", f.bimodal_gap, "Late hypothesis lag, waypoints" + dflt(d.disturbance.bimodal_gap));
  sub.add_option("--noise", f.noise, "Uniform chunk noise amplitude, m" + dflt(d.disturbance.noise));
  sub.add_option("--steps-per-waypoint", f.steps_per_waypoint,
                 "Episode budget per reference waypoint" + dflt(d.steps_per_waypoint));
}

RunConfig resolve(const std::string& command, const Flags& f) {
  json base = cli::to_json(RunConfig{});
  if (f.config) base.merge_patch(cli::config_from_file(*f.config));
  RunConfig c = cli::from_json(base);
  c.command = command;

  if (f.demo) c.demo = *f.demo;
  if (f.task) {
    c.task = parse_task_kind(*f.task);
    if (!c.task) throw InvalidInput("unknown task '" + *f.task + "'");
  }
  if (f.seed) c.seed = *f.seed;
  if (f.count) c.count = *f.count;
  if (f.attempt_cap) c.attempt_cap = *f.attempt_cap;
  if (f.workspace_side) c.replay.workspace.side = *f.workspace_side;
  if (f.gain) c.replay.controller.gain = *f.gain;
  if (f.max_speed) c.replay.controller.max_speed = *f.max_speed;

  if (f.episodes) c.episodes = *f.episodes;
  if (f.betas) c.betas = *f.betas;
  if (f.cells) c.cells = *f.cells;
  if (f.k_const) c.ensemble.k_const = *f.k_const;
  if (f.k_cutoff) c.ensemble.k_cutoff = *f.k_cutoff;
  if (f.chunk_len) {
    c.ensemble.chunk_len = *f.chunk_len;
    c.ensemble.replay_n = 0;
  }
  if (f.no_clear) c.ensemble.clear_after_suspend = false;
  if (f.suite) {
    const auto s = disturbance_suite();
    c.disturbance.latency = s.latency;
    c.disturbance.bimodal_period = s.bimodal_period;
  }
  if (f.latency) c.disturbance.latency = *f.latency;
  if (f.bimodal_period) c.disturbance.bimodal_period = *f.bimodal_period;
  if (f.bimodal_gap) c.disturbance.bimodal_gap = *f.bimodal_gap;
  if (f.noise) c.disturbance.noise = *f.noise;
  if (f.steps_per_waypoint) c.steps_per_waypoint = *f.steps_per_waypoint;
  if (f.cutoffs) c.cutoffs = *f.cutoffs;
  if (f.identity) c.identity = true;
  if (f.attempt) c.attempt = *f.attempt;
  if (f.diagnostics) c.diagnostics = true;

  c.validate();
  if (!fs::exists(c.demo)) throw InvalidInput("demo file not found: " + c.demo);
  c.demo = fs::weakly_canonical(fs::absolute(c.demo)).string();
  return c;
}

struct Loaded {
  DemoTrajectory demo;
  TaskKind task;
};

Loaded load(const RunConfig& c) {
  Loaded l{load_demo(c.demo, c.replay.workspace), TaskKind::PickPlace};
  l.task = c.task.value_or(l.demo.task);
  if (l.task != l.demo.task) {
    throw InvalidInput("task " + std::string(to_string(l.task)) + " does not match the demo's task " +
                       std::string(to_string(l.demo.task)));
  }
  return l;
}

std::optional<fs::path> output_dir(const Flags& f, const RunConfig& c, TaskKind task) {
  if (f.out) return fs::path(*f.out);
  if (const char* root = std::getenv(kOutEnv); root && *root) {
    return fs::path(root) / (c.command + "-" + std::string(to_string(task)) + "-seed" + std::to_string(c.seed));
  }
  return std::nullopt;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

json envelope(const char* kind, const RunConfig& c) {
  return {{"kind", kind},
          {"schema_version", kDatasetSchemaVersion},
          {"code_version", std::string(kCodeVersion)},
          {"config", cli::to_json(c)}};
}

int cmd_augment(const Flags& f) {
  const RunConfig c = resolve("augment", f);
  const auto l = load(c);
  const auto out = output_dir(f, c, l.task);
  if (!out) throw InvalidInput(std::string("no output directory: pass --out or set ") + kOutEnv);

  const auto ds = run_campaign(l.demo, cli::campaign_config(c, l.task), f.jobs);
  write_dataset(*out, ds, cli::to_json(c));
  std::printf("task: %s\nattempts: %zu\nsuccesses: %zu / %zu requested\ndiscard rate: %.1f%%\ndataset: %s\n",
              std::string(to_string(l.task)).c_str(), ds.attempts, ds.successes(), ds.requested,
              100.0 * ds.discard_rate(), out->string().c_str());
  if (ds.cap_exceeded) {
    std::fprintf(stderr, "attempt cap %zu reached before %zu successes; dataset is partial\n",
                 cli::campaign_config(c, l.task).effective_cap(), ds.requested);
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_replay(const Flags& f) {
  const RunConfig c = resolve("replay", f);
  const auto l = load(c);
  EpisodeRecord rec;
  if (c.identity) {
    rec = replay(l.demo, scene_from_demo(l.demo, c.replay.workspace), c.replay);
  } else {
    rec = run_attempt(l.demo, cli::campaign_config(c, l.task), c.attempt);
  }

  std::printf("task: %s\nscene: %s\nsteps: %zu\nsuccess: %s\n", std::string(to_string(l.task)).c_str(),
              c.identity ? "demo" : ("seed " + std::to_string(rec.provenance.scene_seed)).c_str(), rec.steps.size(),
              rec.success ? "yes" : "no");
  for (std::size_t b = 0; b < rec.goals.size() && b < rec.final_state.blocks.size(); ++b) {
    std::printf("block %zu final error: %.4f m\n", b, (rec.final_state.blocks[b].pos - rec.goals[b]).norm());
  }
  if (const auto out = output_dir(f, c, l.task)) {
    fs::create_directories(*out);
    std::ofstream ep(*out / "episode.ndjson", std::ios::binary);
    if (!ep) throw std::runtime_error("cannot write " + (*out / "episode.ndjson").string());
    write_episode_ndjson(ep, rec, 0);
    json m = envelope("replay", c);
    m["success"] = rec.success;
    m["steps"] = rec.steps.size();
    write_text(*out / "manifest.json", m.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_ensemble_eval(const Flags& f) {
  const RunConfig c = resolve("ensemble-eval", f);
  const auto l = load(c);
  const auto out = output_dir(f, c, l.task);
  if (c.diagnostics && !out) throw InvalidInput("--diagnostics needs an output directory");

  const auto cfg = cli::closed_loop_config(c, l.task);
  const auto cells = cli::selected_cells(c);
  const auto seeds = episode_seeds(c.seed, c.episodes);
  const auto report = closed_loop_eval(l.demo, cfg, cells, seeds, f.jobs);

  json doc = envelope("ensemble_eval", c);
  doc["report"] = report_to_json(report);
  const std::string text = report_to_text(report);
  if (f.json_out) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << text;
  }
  if (out) {
    fs::create_directories(*out);
    write_text(*out / "report.json", doc.dump(2) + "\n");
    write_text(*out / "report.txt", text);
    if (c.diagnostics) {
      std::ofstream diag(*out / "diagnostics.ndjson", std::ios::binary);
      if (!diag) throw std::runtime_error("cannot write diagnostics");
      for (const auto& cell : cells) {
        for (auto seed : seeds) {
          run_closed_loop_episode(l.demo, cfg, cell.ensemble, seed, [&](const EnsembleDiagnostics& d) {
            json line = diagnostics_to_json(d);
            line["cell"] = cell.name;
            line["seed"] = seed;
            diag << line.dump() << '\n';
          });
        }
      }
    }
  }
  return kExitOk;
}

int cmd_calibrate(const Flags& f) {
  const RunConfig c = resolve("calibrate-cutoff", f);
  const auto l = load(c);
  const auto cfg = cli::closed_loop_config(c, l.task);
  const auto seeds = episode_seeds(c.seed, c.episodes);

  // baseline once, then reset-only and combined at every beta for each cutoff
  std::vector<EvalCell> cells;
  EnsembleConfig base = c.ensemble;
  base.mode = EnsembleMode::Baseline;
  cells.push_back({"baseline", base});
  for (double k : c.cutoffs) {
    EnsembleConfig e = c.ensemble;
    e.k_cutoff = k;
    for (const auto& cell : ablation_matrix(e, c.betas)) {
      if (cell.ensemble.mode != EnsembleMode::ResetOnly && cell.ensemble.mode != EnsembleMode::Combined) continue;
      std::ostringstream name;
      name << cell.name << "/cutoff=" << k;
      cells.push_back({name.str(), cell.ensemble});
    }
  }
  const auto report = closed_loop_eval(l.demo, cfg, cells, seeds, f.jobs);

  const double top_beta = c.betas.back();
  std::ostringstream top;
  top << "combined@" << top_beta << "/cutoff=";
  json curve = json::array();
  double best_rate = -1.0, best_cutoff = c.cutoffs.front();
  for (double k : c.cutoffs) {
    std::ostringstream key;
    key << top.str() << k;
    const auto* cell = report.find(key.str());
    std::ostringstream reset_key;
    reset_key << "reset_only/cutoff=" << k;
    const auto* reset = report.find(reset_key.str());
    curve.push_back({{"k_cutoff", k},
                     {"combined_rate", cell->rate()},
                     {"reset_only_rate", reset->rate()},
                     {"combined_triggers", cell->triggers()}});
    if (cell->rate() > best_rate) {
      best_rate = cell->rate();
      best_cutoff = k;
    }
  }

  json doc = envelope("calibration", c);
  doc["baseline_rate"] = report.find("baseline")->rate();
  doc["beta"] = top_beta;
  doc["curve"] = curve;
  doc["recommended_k_cutoff"] = best_cutoff;
  doc["report"] = report_to_json(report);

  std::ostringstream text;
  text << report_to_text(report) << "\nrecommended k_cutoff: " << best_cutoff << " (combined@" << top_beta << " "
       << 100.0 * best_rate << "%, baseline " << 100.0 * report.find("baseline")->rate() << "%)\n";
  std::cout << (f.json_out ? doc.dump(2) + "\n" : text.str());
  if (const auto out = output_dir(f, c, l.task)) {
    fs::create_directories(*out);
    write_text(*out / "calibration.json", doc.dump(2) + "\n");
    write_text(*out / "calibration.txt", text.str());
  }
  return kExitOk;
}

int cmd_stats(const Flags& f) {
  if (!f.dataset) throw InvalidInput("--dataset is required");
  if (!fs::exists(fs::path(*f.dataset) / "manifest.json")) {
    throw InvalidInput("no manifest.json under " + *f.dataset);
  }
  const auto s = read_dataset_stats(*f.dataset);
  if (f.json_out) {
    json j = {{"task", s.task},
              {"episodes", s.episodes},
              {"attempts", s.attempts},
              {"discard_rate", s.discard_rate},
              {"total_steps", s.total_steps},
              {"min_steps", s.min_steps},
              {"max_steps", s.max_steps},
              {"successful_episodes", s.successful_episodes},
              {"mean_final_error", s.mean_final_error},
              {"max_final_error", s.max_final_error}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::printf(
        "task: %s\nepisodes: %zu (%zu successful)\nattempts: %zu\ndiscard rate: %.1f%%\nsteps: %zu total, "
        "%zu..%zu per episode\nfinal block error: mean %.4f m, max %.4f m\n",
        s.task.c_str(), s.episodes, s.successful_episodes, s.attempts, 100.0 * s.discard_rate, s.total_steps,
        s.min_steps, s.max_steps, s.mean_final_error, s.max_final_error);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segment-wise demo augmentation and temporal-ensembling evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kCodeVersion));
  Flags f;

  auto* augment = app.add_subcommand("augment", "Warp a demo onto sampled scenes, replay and keep the successes");
  add_run_options(*augment, f);
  augment->add_option("--count", f.count, "Successful episodes wanted" + dflt(RunConfig{}.count));
  augment->add_option("--attempt-cap", f.attempt_cap, "Attempt limit, 0 = 20 x count");

  auto* rep = app.add_subcommand("replay", "Replay one campaign attempt, or the demo itself, for debugging");
  add_run_options(*rep, f);
  rep->add_flag("--identity", f.identity, "Replay the demo in its own scene");
  rep->add_option("--attempt", f.attempt, "Campaign attempt index" + dflt(RunConfig{}.attempt));

  auto* eval = app.add_subcommand("ensemble-eval", "Closed-loop ablation of the temporal ensembler");
  add_run_options(*eval, f);
  add_eval_options(*eval, f);
  eval->add_flag("--diagnostics", f.diagnostics, "Also write diagnostics.ndjson with every ensembler step");
  eval->add_flag("--json", f.json_out, "Print the JSON report instead of the table");

  auto* cal = app.add_subcommand("calibrate-cutoff", "Sweep k_cutoff on the current disturbance settings");
  add_run_options(*cal, f);
  add_eval_options(*cal, f);
  cal->add_option("--cutoffs", f.cutoffs, "Cutoff values to sweep" + dflt(RunConfig{}.cutoffs));
  cal->add_flag("--json", f.json_out, "Print the JSON result instead of the table");

  auto* stats = app.add_subcommand("stats", "Summarize a dataset directory");
  stats->add_option("--dataset", f.dataset, "Dataset directory")->required();
  stats->add_flag("--json", f.json_out, "Print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (augment->parsed()) return cmd_augment(f);
    if (rep->parsed()) return cmd_replay(f);
    if (eval->parsed()) return cmd_ensemble_eval(f);
    if (cal->parsed()) return cmd_calibrate(f);
    if (stats->parsed()) return cmd_stats(f);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  }
  return kExitInvalid;
}
