#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "rightsizer/config.h"
#include "rightsizer/experiment.h"
#include "rightsizer/learner.h"
#include "rightsizer/rng.h"
#include "rightsizer/scheduler.h"

namespace {

using namespace rightsizer;

void BM_CsoaaPredict(benchmark::State& state) {
  CsoaaModel model(32, 7, 0.1);
  Rng rng(1);
  std::vector<double> x(7);
  for (double& v : x) v = rng.Uniform(0, 100);
  for (int i = 0; i < 100; ++i) model.Update(x, MakeLinearCostVector(32, 9, 1, 2));
  for (auto _ : state) benchmark::DoNotOptimize(model.Predict(x));
}
BENCHMARK(BM_CsoaaPredict);

void BM_CsoaaUpdate(benchmark::State& state) {
  CsoaaModel model(32, 7, 0.1);
  std::vector<double> x{1, 2, 3, 4, 5, 6, 7};
  const CostVector costs = MakeLinearCostVector(32, 9, 1, 2);
  for (auto _ : state) model.Update(x, costs);
}
BENCHMARK(BM_CsoaaUpdate);

// Route and complete against a pool of warm containers of mixed sizes.
void BM_RouteHashing(benchmark::State& state) {
  Rng rng(2);
  Scheduler sched(SchedulerConfig{}, &rng);
  std::vector<std::string> fns;
  for (int i = 0; i < 50; ++i) fns.push_back("fn" + std::to_string(i));
  for (const auto& f : fns) {
    for (int v : {2, 4, 8, 16}) {
      Placement p = sched.Route(f, {v, 1024}, 0.0);
      sched.OnComplete(p.container, 0.0);
    }
  }
  size_t i = 0;
  for (auto _ : state) {
    const std::string& f = fns[i++ % fns.size()];
    Placement p = sched.Route(f, {3, 1024}, 1.0);
    sched.OnComplete(p.container, 1.0);
    if (p.background_launch) sched.Destroy(p.background_launch->container);
  }
}
BENCHMARK(BM_RouteHashing);

void BM_DemoRun(benchmark::State& state) {
  RunConfig cfg = LoadRunConfig(std::string(RIGHTSIZER_DATA_DIR) + "/demo.conf");
  cfg.target_rps = static_cast<double>(state.range(0));
  for (auto _ : state) {
    RunArtifacts run = RunExperiment(cfg);
    benchmark::DoNotOptimize(run.metrics.slo_violation_pct);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.target_rps * 600));
}
BENCHMARK(BM_DemoRun)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
