// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rightsizer/allocator.h"
#include "rightsizer/catalog.h"
#include "rightsizer/config.h"
#include "rightsizer/experiment.h"
#include "rightsizer/perf_model.h"
#include "rightsizer/results.h"
#include "rightsizer/rng.h"
#include "rightsizer/simulator.h"
#include "rightsizer/workload.h"

namespace {

using namespace rightsizer;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Num(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

// A simulation the invariant criterion re-runs and inspects.
struct Scenario {
  std::string name;
  std::function<std::pair<ResultsTable, RunStats>()> run;
  int user_cpu = 90;
  std::string first_csv;
  RunStats first_stats;
};

std::vector<Scenario> g_scenarios;

std::string ToCsv(const ResultsTable& t) {
  std::ostringstream out;
  WriteResultsCsv(t, out);
  return out.str();
}

ResultsTable Track(std::string name, int user_cpu,
                   std::function<std::pair<ResultsTable, RunStats>()> run) {
  auto [table, stats] = run();
  g_scenarios.push_back({std::move(name), std::move(run), user_cpu, ToCsv(table), stats});
  return table;
}

RunConfig DemoConfig() {
  return LoadRunConfig(fs::path(RIGHTSIZER_DATA_DIR) / "demo.conf");
}

MetricsReport RunDemo(const std::string& name, const RunConfig& cfg) {
  RunArtifacts first = RunExperiment(cfg);
  MetricsReport m = first.metrics;
  g_scenarios.push_back({name,
                         [cfg] {
                           RunArtifacts a = RunExperiment(cfg);
                           return std::make_pair(a.results, a.stats);
                         },
                         cfg.sim.scheduler.user_cpu, ToCsv(first.results), first.stats});
  return m;
}

// Runs `count` invocations of one (function, input), spaced far enough apart
// that each completes and feeds back before the next arrives.
ResultsTable RunIsolated(const std::string& name, const Catalog& catalog,
                         const std::string& function, const std::string& input,
                         int count, const SloTable& slos) {
  const CatalogFunction& fn = catalog.Get(function);
  const InputDescriptor& in = catalog.GetInput(function, input);
  const double gap = 2.0 * ExecTime(fn.profile, in, 1) + fn.profile.cold_start_ms / 1000.0 + 1.0;
  Schedule s;
  for (int i = 0; i < count; ++i) s.arrivals.push_back({i * gap, function, input});
  SimConfig cfg;
  return Track(name, cfg.scheduler.user_cpu, [cfg, &catalog, slos, s] {
    Simulator sim(cfg, catalog, slos);
    ResultsTable t = sim.Run(s);
    return std::make_pair(t, sim.stats());
  });
}

// Target class re-derived from the documented rules, independent of the
// library code.
int ExpectedTarget(const InvocationOutcome& o, const AllocatorConfig& c) {
  const int alloc = o.alloc.vcpus;
  int t;
  if (o.exec_s <= o.slo_s) {
    const double slack = o.slo_s - o.exec_s;
    const double steps = c.cost_mode == CostMode::kAbsolute ? slack / c.y_s
                                                             : alloc * slack / o.slo_s;
    t = alloc - static_cast<int>(std::floor(steps + 1e-9));
  } else if (o.max_vcpus_used <= 1.0 || o.max_vcpus_used < 0.9 * alloc) {
    t = static_cast<int>(std::ceil(o.max_vcpus_used - 1e-9));
  } else {
    const double deficit = o.exec_s - o.slo_s;
    const double steps = c.cost_mode == CostMode::kAbsolute ? deficit / c.x_s
                                                             : alloc * deficit / o.slo_s;
    t = static_cast<int>(std::ceil(o.max_vcpus_used - 1e-9)) +
        std::max(1, static_cast<int>(std::ceil(steps - 1e-9)));
  }
  return std::clamp(t, 1, c.c_max);
}

Verdict CostFunctionSuite() {
  const auto t0 = Clock::now();
  Rng rng(20240601);
  int mismatches = 0, penalty_failures = 0, case_b_failures = 0, case_b_seen = 0;
  for (int i = 0; i < 1000; ++i) {
    AllocatorConfig cfg;
    cfg.cost_mode = i % 2 ? CostMode::kProportional : CostMode::kAbsolute;
    InvocationOutcome o;
    o.function = "f";
    o.alloc.vcpus = static_cast<int>(rng.UniformInt(1, cfg.c_max));
    o.slo_s = rng.Uniform(0.5, 60.0);
    o.exec_s = rng.Uniform(0.1, 2.0) * o.slo_s;
    o.max_vcpus_used =
        std::round(rng.Uniform(0.1, 1.0) * o.alloc.vcpus * 10.0) / 10.0;
    o.max_vcpus_used = std::clamp(o.max_vcpus_used, 0.1, double(o.alloc.vcpus));
    const CostVector v = BuildVcpuCostVector(o, cfg);
    int argmin = 1;
    for (int c = 2; c <= v.num_classes(); ++c) {
      if (v.cost(c) < v.cost(argmin)) argmin = c;
    }
    if (argmin != ExpectedTarget(o, cfg) || argmin != v.target) ++mismatches;
    for (int d = 1; v.target - d >= 1 && v.target + d <= v.num_classes(); ++d) {
      if (!(v.cost(v.target - d) > v.cost(v.target + d))) ++penalty_failures;
    }
    const bool violated = o.exec_s > o.slo_s;
    if (violated && o.max_vcpus_used < 0.9 * o.alloc.vcpus) {
      ++case_b_seen;
      if (v.target > static_cast<int>(std::ceil(o.max_vcpus_used - 1e-9))) ++case_b_failures;
    }
  }
  const double secs = Seconds(t0);
  Verdict r;
  r.pass = mismatches == 0 && penalty_failures == 0 && case_b_failures == 0 && secs < 1.0;
  r.detail = "1000 outcomes, argmin mismatches " + std::to_string(mismatches) +
             ", penalty failures " + std::to_string(penalty_failures) + ", case-(b) " +
             std::to_string(case_b_failures) + "/" + std::to_string(case_b_seen) +
             " over ceil(used), " + Num(secs) + " s";
  return r;
}

Verdict Convergence(const Catalog& catalog) {
  const auto t0 = Clock::now();
  // Two single-threaded, three bounded multi-threaded, one memory-bound, each
  // with its largest catalog input. Short inputs whose SLO headroom at the
  // default allocation is already below Y never step down in absolute mode.
  std::vector<std::pair<std::string, std::string>> picks;
  for (const char* fn :
       {"imageprocess", "speech2text", "matmult", "compress", "videoprocess", "sentiment"}) {
    picks.emplace_back(fn, catalog.Get(fn).inputs.back().input_id);
  }
  AllocatorConfig defaults;
  const int feedbacks = defaults.vcpu_conf_threshold + 30;
  const SloTable slos = BuildSloTable(catalog, 1.4, defaults.c_max);
  std::map<std::pair<std::string, std::string>, OracleRow> oracle;
  for (const OracleRow& row :
       BuildOracleTable(catalog, 1.4, defaults.c_max, defaults.mem_classes())) {
    oracle[{row.function, row.input_id}] = row;
  }
  bool ok = true;
  std::string detail;
  for (const auto& [fn, in] : picks) {
    ResultsTable t = RunIsolated("convergence " + fn, catalog, fn, in, feedbacks + 1, slos);
    const ResultRow& last = t.rows.back();
    const OracleRow& o = oracle.at({fn, in});
    const int want_cpu = o.min_vcpus.value_or(1);
    const int want_mem = o.min_mem_class;
    const int got_mem = last.alloc_mem_mb / kMemoryClassMb;
    const bool good = o.min_vcpus && std::abs(last.alloc_vcpus - want_cpu) <= 1 &&
                      std::abs(got_mem - want_mem) <= 1;
    ok &= good;
    detail += (detail.empty() ? "" : "; ") + fn + " vcpu " + std::to_string(last.alloc_vcpus) +
              "/" + std::to_string(want_cpu) + " mem " + std::to_string(got_mem) + "/" +
              std::to_string(want_mem);
  }
  const double secs = Seconds(t0);
  return {ok && secs < 5.0, detail + " (got/oracle), " + Num(secs) + " s"};
}

Verdict OomSafeguard() {
  RunConfig cfg = DemoConfig();
  cfg.target_rps = 5;  // 3000 invocations over the 10-minute window
  cfg.sim.allocator.mem_conf_threshold = 20;
  const MetricsReport at20 = RunDemo("oom threshold 20", cfg);
  cfg.sim.allocator.mem_conf_threshold = 4;
  const MetricsReport at4 = RunDemo("oom threshold 4", cfg);
  return {at20.invocations == 3000 && at20.oom_killed_pct < 1.0 &&
              at4.oom_killed_pct > at20.oom_killed_pct,
          std::to_string(at20.invocations) + " invocations, oom_killed_pct " +
              Num(at20.oom_killed_pct) + "% at threshold 20 vs " + Num(at4.oom_killed_pct) +
              "% at 4"};
}

Verdict ColdStartReduction() {
  const auto t0 = Clock::now();
  RunConfig cfg = DemoConfig();
  cfg.target_rps = 6;
  const MetricsReport full = RunDemo("hashing rps 6", cfg);
  cfg.sim.scheduler.policy = SchedulerPolicy::kMemoryCentric;
  const MetricsReport base = RunDemo("memory-centric rps 6", cfg);
  const double secs = Seconds(t0);
  const double reduction =
      base.cold_start_pct > 0 ? 100.0 * (1.0 - full.cold_start_pct / base.cold_start_pct) : 0.0;
  return {reduction >= 40.0 && secs < 10.0,
          "cold_start_pct " + Num(full.cold_start_pct) + "% vs baseline " +
              Num(base.cold_start_pct) + "%, reduction " + Num(reduction, 1) + "%, " +
              Num(secs) + " s"};
}

Verdict AbsoluteVsProportional() {
  RunConfig cfg = DemoConfig();
  cfg.sim.scheduler.user_cpu = 90;
  cfg.target_rps = 6;
  const MetricsReport abs = RunDemo("absolute", cfg);
  cfg.sim.allocator.cost_mode = CostMode::kProportional;
  const MetricsReport prop = RunDemo("proportional", cfg);
  return {abs.slo_violation_pct < prop.slo_violation_pct,
          "slo_violation_pct absolute " + Num(abs.slo_violation_pct) + "% vs proportional " +
              Num(prop.slo_violation_pct) + "%"};
}

Verdict HashingVsPacking() {
  RunConfig cfg = DemoConfig();
  cfg.sim.scheduler.user_cpu = 90;
  cfg.target_rps = 6;
  const MetricsReport hash = RunDemo("hashing", cfg);
  cfg.sim.scheduler.policy = SchedulerPolicy::kPacking;
  const MetricsReport pack = RunDemo("packing", cfg);
  return {hash.slo_violation_pct <= pack.slo_violation_pct,
          "slo_violation_pct hashing " + Num(hash.slo_violation_pct) + "% vs packing " +
              Num(pack.slo_violation_pct) + "%"};
}

Verdict SingleThreadedStability(const Catalog& catalog) {
  const std::string fn = "sentiment", in = "js-900k";
  SloTable slos = BuildSloTable(catalog, 1.4);
  const double work = WorkSeconds(catalog.Get(fn).profile, catalog.GetInput(fn, in));
  slos.Set(fn, in, 0.5 * work);  // unreachable at any vCPU count
  AllocatorConfig defaults;
  const int warmup = defaults.vcpu_conf_threshold + 30;
  ResultsTable t = RunIsolated("single-threaded infeasible", catalog, fn, in, warmup + 100, slos);
  int peak = 0;
  for (size_t i = warmup; i < t.rows.size(); ++i) peak = std::max(peak, t.rows[i].alloc_vcpus);
  return {peak <= 2 && t.rows.size() == size_t(warmup + 100),
          "max vCPUs over 100 post-convergence invocations " + std::to_string(peak) +
              " (SLO " + Num(0.5 * work, 1) + " s vs work " + Num(work, 1) + " s)"};
}

Verdict OversubscriptionSweep(std::vector<double>* timeouts_out) {
  RunConfig cfg = DemoConfig();
  cfg.target_rps = 6;
  std::vector<double> timeouts;
  std::string detail = "timeout_pct";
  for (int cpu : {90, 110, 130}) {
    cfg.sim.scheduler.user_cpu = cpu;
    const MetricsReport m = RunDemo("user_cpu " + std::to_string(cpu), cfg);
    timeouts.push_back(m.timeout_pct);
    detail += " " + std::to_string(cpu) + ":" + Num(m.timeout_pct) + "%";
  }
  *timeouts_out = timeouts;
  return {std::is_sorted(timeouts.begin(), timeouts.end()), detail};
}

Verdict SloMultiplierSweep() {
  RunConfig cfg = DemoConfig();
  cfg.target_rps = 6;
  std::vector<MetricsReport> ms;
  std::string detail = "slo_violation_pct";
  for (double mult : {1.2, 1.4, 1.6, 1.8}) {
    cfg.slo_multiplier = mult;
    ms.push_back(RunDemo("multiplier " + Num(mult, 1), cfg));
    detail += " " + Num(mult, 1) + ":" + Num(ms.back().slo_violation_pct, 2) + "%";
  }
  bool nonincreasing = true;
  for (size_t i = 1; i < ms.size(); ++i) {
    nonincreasing &= ms[i].slo_violation_pct <= ms[i - 1].slo_violation_pct;
  }
  const MetricsReport& tight = ms.front();
  const MetricsReport& loose = ms.back();
  const bool waste_ok = tight.wasted_vcpus.p50 <= loose.wasted_vcpus.p50 + 1e-9 &&
                        tight.wasted_vcpus.p95 <= loose.wasted_vcpus.p95 + 2.0 + 1e-9;
  detail += "; wasted vCPUs p50 " + Num(tight.wasted_vcpus.p50, 1) + " vs " +
            Num(loose.wasted_vcpus.p50, 1) + ", p95 " + Num(tight.wasted_vcpus.p95, 1) +
            " vs " + Num(loose.wasted_vcpus.p95, 1) + " (1.2 vs 1.8)";
  return {nonincreasing && waste_ok, detail};
}

Verdict Invariants() {
  int audit = 0, capacity = 0, clock = 0, nondeterministic = 0, over_cpu = 0;
  double worst_work = 0.0;
  for (Scenario& s : g_scenarios) {
    auto [table, stats] = s.run();
    if (ToCsv(table) != s.first_csv) ++nondeterministic;
    for (const RunStats* st : {&s.first_stats, &stats}) {
      audit += st->audit_failures > 0;
      capacity += st->capacity_violations > 0;
      clock += st->clock_regressions > 0;
      over_cpu += st->max_active_vcpus > s.user_cpu;
      worst_work = std::max(worst_work, st->max_work_error);
    }
  }
  const bool ok = audit == 0 && capacity == 0 && clock == 0 && nondeterministic == 0 &&
                  over_cpu == 0 && worst_work < 1e-6;
  return {ok, std::to_string(g_scenarios.size()) + " scenarios run twice: audit failures " +
                  std::to_string(audit) + ", over user_cpu " + std::to_string(over_cpu + capacity) +
                  ", clock regressions " + std::to_string(clock) + ", byte mismatches " +
                  std::to_string(nondeterministic) + ", max work error " +
                  Num(worst_work * 1e9, 3) + "e-9"};
}

}  // namespace

int main() {
  const Catalog catalog = Catalog::Load(fs::path(RIGHTSIZER_DATA_DIR) / "demo_catalog.txt");
  std::vector<std::pair<std::string, Verdict>> verdicts(10);
  std::vector<double> timeouts;
  verdicts[0] = {"cost-function suite", CostFunctionSuite()};
  verdicts[1] = {"learner vs oracle convergence", Convergence(catalog)};
  verdicts[2] = {"OOM safeguard", OomSafeguard()};
  verdicts[3] = {"scheduler cold-start reduction", ColdStartReduction()};
  verdicts[4] = {"absolute vs proportional", AbsoluteVsProportional()};
  verdicts[5] = {"hashing vs packing", HashingVsPacking()};
  verdicts[6] = {"single-threaded stability", SingleThreadedStability(catalog)};
  verdicts[8] = {"oversubscription sensitivity", OversubscriptionSweep(&timeouts)};
  verdicts[9] = {"SLO-multiplier sweep", SloMultiplierSweep()};
  verdicts[7] = {"capacity and determinism invariants", Invariants()};

  int failures = 0;
  for (size_t i = 0; i < verdicts.size(); ++i) {
    const auto& [name, v] = verdicts[i];
    std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, name.c_str(),
                v.detail.c_str());
    failures += !v.pass;
  }
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
