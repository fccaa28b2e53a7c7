// rightsizer: command-line driver for the rightsizing simulator.
//
// Exit codes: 0 success, 1 simulation error, 2 bad input.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rightsizer/catalog.h"
#include "rightsizer/config.h"
#include "rightsizer/csv.h"
#include "rightsizer/error.h"
#include "rightsizer/experiment.h"
#include "rightsizer/metrics.h"
#include "rightsizer/results.h"
#include "rightsizer/workload.h"

namespace fs = std::filesystem;
using namespace rightsizer;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<double> rps;
  std::string policy;
  std::string out;
  std::vector<std::string> sets;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Run configuration file")->required();
  cmd->add_option("--seed", f.seed, "Override the random seed");
  cmd->add_option("--rps", f.rps, "Override the target request rate");
  cmd->add_option("--policy", f.policy,
                  "Override the scheduler policy (hashing, packing, "
                  "memory_centric_baseline)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--set", f.sets, "Override any config key, as key=value");
}

RunConfig ResolveConfig(const CommonFlags& f) {
  RunConfig config = LoadRunConfig(f.config);
  const fs::path cwd = fs::current_path();
  for (const std::string& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("--set expects key=value, got " + kv);
    SetConfigValue(config, Trim(kv.substr(0, eq)), Trim(kv.substr(eq + 1)), cwd);
  }
  if (f.seed) config.sim.seed = *f.seed;
  if (f.rps) SetConfigValue(config, "target_rps", FormatDouble(*f.rps));
  if (!f.policy.empty()) SetConfigValue(config, "scheduler_policy", f.policy);
  if (!f.out.empty()) config.output_dir = f.out;
  ValidateRunConfig(config);
  return config;
}

void PrintHeadline(const MetricsReport& m, std::ostream& out) {
  out << "invocations " << m.invocations << "\n"
      << "slo_violation_pct " << FormatDouble(m.slo_violation_pct) << "\n"
      << "cold_start_pct " << FormatDouble(m.cold_start_pct) << "\n"
      << "wasted_vcpus_p50 " << FormatDouble(m.wasted_vcpus.p50) << "\n"
      << "wasted_memory_mb_p50 " << FormatDouble(m.wasted_memory_mb.p50) << "\n"
      << "oom_killed_pct " << FormatDouble(m.oom_killed_pct) << "\n"
      << "timeout_pct " << FormatDouble(m.timeout_pct) << "\n";
}

int CmdRun(const CommonFlags& f) {
  const RunConfig config = ResolveConfig(f);
  RunArtifacts run = RunExperiment(config);
  if (run.results.rows.empty()) throw InputError("schedule produced no invocations");
  if (run.schedule.supply_short) {
    std::cerr << "warning: trace window cannot supply the requested rate\n";
  }
  WriteRunOutputs(run, config.output_dir);
  PrintHeadline(run.metrics, std::cout);
  if (run.stats.audit_failures > 0) {
    throw SimulationError("invariant audit failed " +
                          std::to_string(run.stats.audit_failures) + " times");
  }
  return 0;
}

int CmdSweep(const CommonFlags& f, const std::string& axis_name,
             const std::vector<std::string>& values, int threads) {
  const RunConfig config = ResolveConfig(f);
  const auto axis = ParseSweepAxis(axis_name);
  if (!axis) throw InputError("unknown sweep axis: " + axis_name);
  const int n = threads > 0 ? threads : SweepThreadsFromEnv();
  const auto rows = RunSweep(config, *axis, values, n, config.output_dir);
  fs::create_directories(config.output_dir);
  std::ofstream summary(config.output_dir / "summary.csv");
  if (!summary) throw InputError("cannot write summary.csv");
  WriteSweepSummary(*axis, rows, summary);
  WriteSweepSummary(*axis, rows, std::cout);
  return 0;
}

int CmdOracle(const CommonFlags& f) {
  const RunConfig config = ResolveConfig(f);
  const Catalog catalog = Catalog::Load(config.catalog_path);
  const auto rows = BuildOracleTable(catalog, config.slo_multiplier,
                                     config.sim.allocator.c_max,
                                     config.sim.allocator.mem_classes());
  if (f.out.empty()) {
    WriteOracleCsv(rows, std::cout);
  } else {
    fs::create_directories(config.output_dir);
    std::ofstream out(config.output_dir / "oracle.csv");
    if (!out) throw InputError("cannot write oracle.csv");
    WriteOracleCsv(rows, out);
  }
  return 0;
}

int CmdSummarize(const std::string& results, const std::string& out_path) {
  const ResultsTable table = LoadResultsCsv(results);
  if (table.rows.empty()) throw InputError(results + " holds no invocations");
  const MetricsReport m = Summarize(table);
  if (out_path.empty()) {
    WriteMetricsCsv(m, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot write " + out_path);
    WriteMetricsCsv(m, out);
  }
  return 0;
}

int CmdGenTrace(int functions, double per_minute, uint64_t seed,
                const std::string& out_path) {
  if (functions < 1) throw InputError("--functions must be at least 1");
  if (!(per_minute > 0)) throw InputError("--per-minute must be positive");
  const Trace trace = SynthesizeTrace(functions, per_minute, seed);
  std::ofstream out(out_path);
  if (!out) throw InputError("cannot write " + out_path);
  WriteTrace(trace, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven simulator for learned serverless rightsizing"};
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags, oracle_flags;
  auto* run = app.add_subcommand("run", "Simulate one configuration");
  AddCommonFlags(run, run_flags);

  auto* sweep = app.add_subcommand("sweep", "Run one configuration per axis value");
  AddCommonFlags(sweep, sweep_flags);
  std::string axis;
  std::vector<std::string> values;
  int threads = 0;
  sweep->add_option("--axis", axis,
                    "rps, user_cpu, vcpu_conf_threshold, mem_conf_threshold, "
                    "slo_multiplier, cost_mode or scheduler_policy")
      ->required();
  sweep->add_option("--values", values, "Comma-separated axis values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--threads", threads,
                    "Parallel runs (default FAAS_RIGHTSIZER_THREADS or all cores)");

  auto* oracle = app.add_subcommand("oracle", "Print the per-input oracle allocations");
  AddCommonFlags(oracle, oracle_flags);

  auto* summarize = app.add_subcommand("summarize", "Recompute metrics from results.csv");
  std::string results_path, metrics_out;
  summarize->add_option("results", results_path, "results.csv")->required();
  summarize->add_option("--out", metrics_out, "Write metrics.csv here");

  auto* gen = app.add_subcommand("gen-trace", "Write a synthetic per-minute trace");
  int functions = 50;
  double per_minute = 20;
  uint64_t gen_seed = 1;
  std::string trace_out;
  gen->add_option("--functions", functions, "Number of trace functions");
  gen->add_option("--per-minute", per_minute, "Mean invocations per function-minute");
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--out", trace_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) return CmdRun(run_flags);
    if (*sweep) return CmdSweep(sweep_flags, axis, values, threads);
    if (*oracle) return CmdOracle(oracle_flags);
    if (*summarize) return CmdSummarize(results_path, metrics_out);
    if (*gen) return CmdGenTrace(functions, per_minute, gen_seed, trace_out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
