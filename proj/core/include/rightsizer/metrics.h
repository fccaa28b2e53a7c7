#pragma once

#include <map>
#include <ostream>
#include <span>
#include <string>

#include "rightsizer/results.h"

namespace rightsizer {

struct Percentiles {
  double p50 = 0.0;
  double p75 = 0.0;
  double p90 = 0.0;
  double p95 = 0.0;
};

// Nearest-rank percentile of an ascending sample; 0 for an empty sample.
double NearestRank(std::span<const double> sorted, double pct);

Percentiles ComputePercentiles(std::vector<double> values);

struct MetricsReport {
  size_t invocations = 0;
  double slo_violation_pct = 0.0;
  double cold_start_pct = 0.0;
  double pct_violations_with_cold_start = 0.0;
  // Allocated minus used, over completed invocations.
  Percentiles wasted_vcpus;
  Percentiles wasted_memory_mb;
  double vcpu_utilization_pct = 0.0;
  double mem_utilization_pct = 0.0;
  double oom_killed_pct = 0.0;
  double timeout_pct = 0.0;
  double rejected_pct = 0.0;
  // Distinct container sizes invocations ran in, per function.
  std::map<std::string, int> unique_container_sizes;
};

// Throws InputError on an empty table. Killed, timed-out and rejected
// invocations count as SLO violations.
MetricsReport Summarize(const ResultsTable& results);

// Long format: `metric,function,value`; per-function rows carry the function
// name, cluster-wide rows leave it empty.
void WriteMetricsCsv(const MetricsReport& report, std::ostream& out);

}  // namespace rightsizer
