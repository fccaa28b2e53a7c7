#include "rightsizer/experiment.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "rightsizer/csv.h"
#include "rightsizer/error.h"

namespace rightsizer {

RunArtifacts RunExperiment(const RunConfig& config, const Catalog& catalog,
                           const Trace& trace) {
  ValidateRunConfig(config);
  RunArtifacts run;
  if (!config.schedule_path.empty()) {
    run.schedule = LoadScheduleCsv(config.schedule_path, catalog);
    run.schedule.seed = config.seed();
  } else {
    run.schedule = GenerateSchedule(trace, config.target_rps, config.seed(), catalog,
                                    config.window_minutes);
  }
  const SloTable slos =
      BuildSloTable(catalog, config.slo_multiplier, config.sim.allocator.c_max);
  Simulator sim(config.sim, catalog, slos);
  run.results = sim.Run(run.schedule);
  run.stats = sim.stats();
  run.results.metadata = DescribeRunConfig(config);
  run.results.metadata.emplace_back("window_start_minute",
                                    std::to_string(run.schedule.window_start_minute));
  run.results.metadata.emplace_back("supply_short",
                                    run.schedule.supply_short ? "1" : "0");
  run.results.metadata.emplace_back("invocations",
                                    std::to_string(run.results.rows.size()));
  if (!run.results.rows.empty()) {
    // Summarize what the CSV holds so file and in-memory metrics agree.
    std::stringstream csv;
    WriteResultsCsv(run.results, csv);
    run.metrics = Summarize(ReadResultsCsv(csv));
  }
  return run;
}

RunArtifacts RunExperiment(const RunConfig& config) {
  if (config.catalog_path.empty()) throw InputError("config does not name a catalog");
  Catalog catalog = Catalog::Load(config.catalog_path);
  Trace trace;
  if (config.schedule_path.empty()) {
    if (config.trace_path.empty()) throw InputError("config does not name a trace");
    trace = LoadTrace(config.trace_path);
  }
  return RunExperiment(config, catalog, trace);
}

void WriteRunOutputs(const RunArtifacts& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "results.csv");
    if (!out) throw InputError("cannot write " + (dir / "results.csv").string());
    WriteResultsCsv(run.results, out);
  }
  std::ofstream out(dir / "metrics.csv");
  if (!out) throw InputError("cannot write " + (dir / "metrics.csv").string());
  WriteMetricsCsv(Summarize(LoadResultsCsv(dir / "results.csv")), out);
}

namespace {

constexpr std::pair<SweepAxis, std::string_view> kAxisNames[] = {
    {SweepAxis::kRps, "rps"},
    {SweepAxis::kUserCpu, "user_cpu"},
    {SweepAxis::kVcpuConfThreshold, "vcpu_conf_threshold"},
    {SweepAxis::kMemConfThreshold, "mem_conf_threshold"},
    {SweepAxis::kSloMultiplier, "slo_multiplier"},
    {SweepAxis::kCostMode, "cost_mode"},
    {SweepAxis::kSchedulerPolicy, "scheduler_policy"},
};

}  // namespace

std::optional<SweepAxis> ParseSweepAxis(std::string_view name) {
  for (const auto& [axis, n] : kAxisNames) {
    if (n == name) return axis;
  }
  return std::nullopt;
}

std::string_view ToString(SweepAxis axis) {
  for (const auto& [a, n] : kAxisNames) {
    if (a == axis) return n;
  }
  return "unknown";
}

void ApplySweepValue(RunConfig& config, SweepAxis axis, std::string_view value) {
  const std::string_view key =
      axis == SweepAxis::kRps ? std::string_view("target_rps") : ToString(axis);
  SetConfigValue(config, key, value);
}

std::vector<SweepRow> RunSweep(const RunConfig& base, SweepAxis axis,
                               const std::vector<std::string>& values, int threads,
                               const std::optional<std::filesystem::path>& out_dir) {
  if (values.empty()) throw InputError("sweep needs at least one value");
  std::vector<RunConfig> configs;
  for (const auto& v : values) {
    RunConfig c = base;
    ApplySweepValue(c, axis, v);
    ValidateRunConfig(c);
    configs.push_back(std::move(c));
  }
  const Catalog catalog = Catalog::Load(base.catalog_path);
  Trace trace;
  if (base.schedule_path.empty()) trace = LoadTrace(base.trace_path);

  std::vector<SweepRow> rows(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < values.size(); i = next++) {
      try {
        RunArtifacts run = RunExperiment(configs[i], catalog, trace);
        if (out_dir) {
          WriteRunOutputs(run, *out_dir / (std::string(ToString(axis)) + "_" + values[i]));
        }
        rows[i] = SweepRow{values[i], std::move(run.metrics), run.stats};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(threads, 1, static_cast<int>(values.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void WriteSweepSummary(SweepAxis axis, const std::vector<SweepRow>& rows,
                       std::ostream& out) {
  out << ToString(axis)
      << ",invocations,slo_violation_pct,cold_start_pct,"
         "pct_violations_with_cold_start,wasted_vcpus_p50,wasted_vcpus_p75,"
         "wasted_vcpus_p90,wasted_vcpus_p95,wasted_memory_mb_p50,"
         "wasted_memory_mb_p75,wasted_memory_mb_p90,wasted_memory_mb_p95,"
         "vcpu_utilization_pct,mem_utilization_pct,oom_killed_pct,timeout_pct,"
         "rejected_pct\n";
  for (const SweepRow& r : rows) {
    const MetricsReport& m = r.metrics;
    out << r.value << ',' << m.invocations;
    for (double v : {m.slo_violation_pct, m.cold_start_pct,
                     m.pct_violations_with_cold_start, m.wasted_vcpus.p50,
                     m.wasted_vcpus.p75, m.wasted_vcpus.p90, m.wasted_vcpus.p95,
                     m.wasted_memory_mb.p50, m.wasted_memory_mb.p75,
                     m.wasted_memory_mb.p90, m.wasted_memory_mb.p95,
                     m.vcpu_utilization_pct, m.mem_utilization_pct,
                     m.oom_killed_pct, m.timeout_pct, m.rejected_pct}) {
      out << ',' << FormatDouble(v);
    }
    out << '\n';
  }
}

std::vector<OracleRow> BuildOracleTable(const Catalog& catalog,
                                        double slo_multiplier, int c_max,
                                        int mem_classes) {
  const SloTable slos = BuildSloTable(catalog, slo_multiplier, c_max);
  std::vector<OracleRow> rows;
  for (const auto& fn : catalog.functions()) {
    for (const auto& in : fn.inputs) {
      OracleRow r;
      r.function = fn.profile.name;
      r.input_id = in.input_id;
      r.slo_s = slos.Get(fn.profile.name, in.input_id);
      r.min_vcpus = OracleMinVcpus(fn.profile, in, r.slo_s, c_max);
      r.min_mem_class = std::min(MinMemoryClass(fn.profile, in), mem_classes);
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

void WriteOracleCsv(const std::vector<OracleRow>& rows, std::ostream& out) {
  out << "function,input_id,slo_s,min_vcpus,min_mem_class,feasible\n";
  for (const OracleRow& r : rows) {
    out << r.function << ',' << r.input_id << ',' << FormatDouble(r.slo_s) << ','
        << (r.min_vcpus ? std::to_string(*r.min_vcpus) : std::string()) << ','
        << r.min_mem_class << ',' << (r.min_vcpus ? 1 : 0) << '\n';
  }
}

int SweepThreadsFromEnv() {
  if (const char* env = std::getenv("FAAS_RIGHTSIZER_THREADS")) {
    try {
      int64_t n = ParseInt(env, "FAAS_RIGHTSIZER_THREADS");
      if (n >= 1) return static_cast<int>(n);
    } catch (const InputError&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace rightsizer
