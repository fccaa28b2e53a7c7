#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rightsizer/catalog.h"
#include "rightsizer/config.h"
#include "rightsizer/metrics.h"
#include "rightsizer/results.h"
#include "rightsizer/simulator.h"
#include "rightsizer/workload.h"

namespace rightsizer {

struct RunArtifacts {
  Schedule schedule;
  ResultsTable results;
  MetricsReport metrics;
  RunStats stats;
};

// Schedule -> simulation -> summary, using already loaded inputs. `trace` is
// ignored when the config names a replay schedule.
RunArtifacts RunExperiment(const RunConfig& config, const Catalog& catalog,
                           const Trace& trace);

// Loads the catalog and trace named by the config first.
RunArtifacts RunExperiment(const RunConfig& config);

// Writes results.csv and metrics.csv into `dir`. metrics.csv is computed
// from the results file as written, so re-summarizing results.csv yields the
// same bytes.
void WriteRunOutputs(const RunArtifacts& run, const std::filesystem::path& dir);

enum class SweepAxis {
  kRps,
  kUserCpu,
  kVcpuConfThreshold,
  kMemConfThreshold,
  kSloMultiplier,
  kCostMode,
  kSchedulerPolicy,
};

std::optional<SweepAxis> ParseSweepAxis(std::string_view name);
std::string_view ToString(SweepAxis axis);
void ApplySweepValue(RunConfig& config, SweepAxis axis, std::string_view value);

struct SweepRow {
  std::string value;
  MetricsReport metrics;
  RunStats stats;
};

// One independent run per value on up to `threads` threads. Rows come back
// in the order of `values`. When `out_dir` is set each run writes its files
// to out_dir/<axis>_<value>/.
std::vector<SweepRow> RunSweep(const RunConfig& base, SweepAxis axis,
                               const std::vector<std::string>& values,
                               int threads,
                               const std::optional<std::filesystem::path>& out_dir);

void WriteSweepSummary(SweepAxis axis, const std::vector<SweepRow>& rows,
                       std::ostream& out);

struct OracleRow {
  std::string function;
  std::string input_id;
  double slo_s = 0.0;
  std::optional<int> min_vcpus;  // nullopt: infeasible
  int min_mem_class = 1;
};

std::vector<OracleRow> BuildOracleTable(const Catalog& catalog,
                                        double slo_multiplier, int c_max,
                                        int mem_classes);

void WriteOracleCsv(const std::vector<OracleRow>& rows, std::ostream& out);

// Thread cap for sweeps: FAAS_RIGHTSIZER_THREADS if set, else hardware
// concurrency.
int SweepThreadsFromEnv();

}  // namespace rightsizer
