#include <benchmark/benchmark.h>

#include <omp.h>

#include "warpdemo/campaign.hpp"
#include "warpdemo/evaluation.hpp"

using namespace warpdemo;

namespace {

const DemoTrajectory& stack_demo() {
  static const DemoTrajectory d = load_demo(WARPDEMO_DATA_DIR "/demos/stack.json");
  return d;
}

CampaignConfig campaign_cfg() {
  CampaignConfig cfg;
  cfg.task = TaskKind::Stack;
  cfg.count = 200;
  cfg.seed = 5;
  return cfg;
}

ClosedLoopConfig eval_cfg() {
  ClosedLoopConfig cfg;
  cfg.task = TaskKind::Stack;
  cfg.disturbance = disturbance_suite();
  return cfg;
}

const std::vector<EvalCell>& eval_cells() {
  static const auto cells = ablation_matrix(EnsembleConfig{}, {1.0});
  return cells;
}

void BM_CampaignSerial(benchmark::State& state) {
  const auto cfg = campaign_cfg();
  for (auto _ : state) benchmark::DoNotOptimize(run_campaign_serial(stack_demo(), cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(cfg.count));
}

void BM_CampaignParallel(benchmark::State& state) {
  const auto cfg = campaign_cfg();
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_campaign(stack_demo(), cfg, jobs));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(cfg.count));
}

void BM_EvalSerial(benchmark::State& state) {
  const auto cfg = eval_cfg();
  const auto seeds = episode_seeds(1, 50);
  for (auto _ : state) benchmark::DoNotOptimize(closed_loop_eval_serial(stack_demo(), cfg, eval_cells(), seeds));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(seeds.size() * eval_cells().size()));
}

void BM_EvalParallel(benchmark::State& state) {
  const auto cfg = eval_cfg();
  const auto seeds = episode_seeds(1, 50);
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(closed_loop_eval(stack_demo(), cfg, eval_cells(), seeds, jobs));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(seeds.size() * eval_cells().size()));
}

void jobs_args(benchmark::internal::Benchmark* b) {
  for (int j : {1, 2, 4}) b->Arg(j);
  if (const int max = omp_get_max_threads(); max > 4) b->Arg(max);
}

}  // namespace

BENCHMARK(BM_CampaignSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CampaignParallel)->Apply(jobs_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvalSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvalParallel)->Apply(jobs_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
