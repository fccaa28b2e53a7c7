#include "rightsizer/metrics.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "rightsizer/csv.h"
#include "rightsizer/error.h"

namespace rightsizer {

double NearestRank(std::span<const double> sorted, double pct) {
  if (sorted.empty()) return 0.0;
  auto rank = static_cast<size_t>(std::ceil(pct / 100.0 * sorted.size()));
  rank = std::clamp<size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

Percentiles ComputePercentiles(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {NearestRank(values, 50), NearestRank(values, 75),
          NearestRank(values, 90), NearestRank(values, 95)};
}

MetricsReport Summarize(const ResultsTable& results) {
  if (results.rows.empty()) throw InputError("cannot summarize an empty results table");
  MetricsReport m;
  m.invocations = results.rows.size();
  size_t violations = 0, cold = 0, violations_cold = 0, oom = 0, timeouts = 0,
         rejected = 0, completed = 0;
  double cpu_util = 0.0, mem_util = 0.0;
  std::vector<double> waste_cpu, waste_mem;
  std::map<std::string, std::set<std::pair<int, int>>> sizes;
  for (const ResultRow& r : results.rows) {
    const bool is_cold = r.placement == PlacementKind::kCold;
    const bool violated = !r.slo_met;
    if (is_cold) ++cold;
    if (violated) ++violations;
    if (violated && is_cold) ++violations_cold;
    if (r.oom_killed) ++oom;
    if (r.timeout) ++timeouts;
    if (r.placement == PlacementKind::kRejected) {
      ++rejected;
      continue;
    }
    sizes[r.function].emplace(r.container_vcpus, r.container_mem_mb);
    if (!r.completed()) continue;
    ++completed;
    waste_cpu.push_back(r.container_vcpus - r.max_vcpus_used);
    waste_mem.push_back(r.container_mem_mb - r.peak_mem_mb);
    cpu_util += r.max_vcpus_used / r.container_vcpus;
    mem_util += r.peak_mem_mb / r.container_mem_mb;
  }
  const double n = static_cast<double>(m.invocations);
  m.slo_violation_pct = 100.0 * violations / n;
  m.cold_start_pct = 100.0 * cold / n;
  m.pct_violations_with_cold_start =
      violations ? 100.0 * violations_cold / violations : 0.0;
  m.oom_killed_pct = 100.0 * oom / n;
  m.timeout_pct = 100.0 * timeouts / n;
  m.rejected_pct = 100.0 * rejected / n;
  m.wasted_vcpus = ComputePercentiles(std::move(waste_cpu));
  m.wasted_memory_mb = ComputePercentiles(std::move(waste_mem));
  if (completed) {
    m.vcpu_utilization_pct = 100.0 * cpu_util / completed;
    m.mem_utilization_pct = 100.0 * mem_util / completed;
  }
  for (const auto& [fn, s] : sizes) m.unique_container_sizes[fn] = static_cast<int>(s.size());
  return m;
}

void WriteMetricsCsv(const MetricsReport& m, std::ostream& out) {
  auto row = [&](std::string_view metric, double value) {
    out << metric << ",," << FormatDouble(value) << '\n';
  };
  auto pct = [&](std::string_view metric, const Percentiles& p) {
    std::string base(metric);
    row(base + "_p50", p.p50);
    row(base + "_p75", p.p75);
    row(base + "_p90", p.p90);
    row(base + "_p95", p.p95);
  };
  out << "metric,function,value\n";
  row("invocations", static_cast<double>(m.invocations));
  row("slo_violation_pct", m.slo_violation_pct);
  row("cold_start_pct", m.cold_start_pct);
  row("pct_violations_with_cold_start", m.pct_violations_with_cold_start);
  pct("wasted_vcpus", m.wasted_vcpus);
  pct("wasted_memory_mb", m.wasted_memory_mb);
  row("vcpu_utilization_pct", m.vcpu_utilization_pct);
  row("mem_utilization_pct", m.mem_utilization_pct);
  row("oom_killed_pct", m.oom_killed_pct);
  row("timeout_pct", m.timeout_pct);
  row("rejected_pct", m.rejected_pct);
  for (const auto& [fn, count] : m.unique_container_sizes) {
    out << "unique_container_sizes," << fn << ',' << count << '\n';
  }
}

}  // namespace rightsizer
