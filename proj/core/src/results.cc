#include "rightsizer/results.h"

#include <array>
#include <fstream>

#include "rightsizer/csv.h"
#include "rightsizer/error.h"

namespace rightsizer {
namespace {

constexpr std::array<std::string_view, 24> kColumns{
    "invocation",      "arrival_s",       "function",      "input_id",
    "slo_s",           "featurize_ms",    "alloc_vcpus",   "alloc_mem_mb",
    "vcpu_from_model", "mem_from_model",  "placement",     "worker",
    "container_vcpus", "container_mem_mb", "queue_s",      "cold_start_s",
    "exec_s",          "e2e_s",           "slo_met",       "max_vcpus_used",
    "peak_mem_mb",     "oom_killed",      "timeout",       "status"};

std::string_view Status(const ResultRow& r) {
  if (r.placement == PlacementKind::kRejected) return "rejected";
  if (r.oom_killed) return "oom_killed";
  if (r.timeout) return "timeout";
  return "completed";
}

PlacementKind ParsePlacement(std::string_view s, const std::string& where) {
  for (auto k : {PlacementKind::kWarmExact, PlacementKind::kWarmLarger,
                 PlacementKind::kCold, PlacementKind::kQueued,
                 PlacementKind::kRejected}) {
    if (ToString(k) == s) return k;
  }
  throw InputError(where + ": unknown placement '" + std::string(s) + "'");
}

}  // namespace

void WriteResultsCsv(const ResultsTable& table, std::ostream& out) {
  for (const auto& [key, value] : table.metadata) {
    out << "# " << key << '=' << value << '\n';
  }
  for (size_t i = 0; i < kColumns.size(); ++i) {
    out << (i ? "," : "") << kColumns[i];
  }
  out << '\n';
  for (const ResultRow& r : table.rows) {
    out << r.invocation << ',' << FormatDouble(r.arrival_s) << ',' << r.function
        << ',' << r.input_id << ',' << FormatDouble(r.slo_s) << ','
        << FormatDouble(r.featurize_ms) << ',' << r.alloc_vcpus << ','
        << r.alloc_mem_mb << ',' << int{r.vcpu_from_model} << ','
        << int{r.mem_from_model} << ',' << ToString(r.placement) << ','
        << r.worker << ',' << r.container_vcpus << ',' << r.container_mem_mb
        << ',' << FormatDouble(r.queue_s) << ',' << FormatDouble(r.cold_start_s)
        << ',' << FormatDouble(r.exec_s) << ',' << FormatDouble(r.e2e_s) << ','
        << int{r.slo_met} << ',' << FormatDouble(r.max_vcpus_used) << ','
        << FormatDouble(r.peak_mem_mb) << ',' << int{r.oom_killed} << ','
        << int{r.timeout} << ',' << Status(r) << '\n';
  }
}

ResultsTable ReadResultsCsv(std::istream& in, std::string_view source) {
  ResultsTable table;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    if (line.rfind("# ", 0) == 0) {
      auto eq = line.find('=');
      if (eq == std::string::npos) throw InputError(where + ": bad metadata line");
      table.metadata.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
      continue;
    }
    if (Trim(line).empty()) continue;
    auto f = SplitCsvLine(line);
    if (f.size() != kColumns.size()) {
      throw InputError(where + ": expected " + std::to_string(kColumns.size()) +
                       " columns");
    }
    if (!header_seen) {
      if (f[0] != kColumns[0]) throw InputError(where + ": missing header");
      header_seen = true;
      continue;
    }
    ResultRow r;
    size_t i = 0;
    r.invocation = static_cast<uint64_t>(ParseInt(f[i++], where));
    r.arrival_s = ParseDouble(f[i++], where);
    r.function = f[i++];
    r.input_id = f[i++];
    r.slo_s = ParseDouble(f[i++], where);
    r.featurize_ms = ParseDouble(f[i++], where);
    r.alloc_vcpus = static_cast<int>(ParseInt(f[i++], where));
    r.alloc_mem_mb = static_cast<int>(ParseInt(f[i++], where));
    r.vcpu_from_model = ParseBool(f[i++], where);
    r.mem_from_model = ParseBool(f[i++], where);
    r.placement = ParsePlacement(f[i++], where);
    r.worker = static_cast<int>(ParseInt(f[i++], where));
    r.container_vcpus = static_cast<int>(ParseInt(f[i++], where));
    r.container_mem_mb = static_cast<int>(ParseInt(f[i++], where));
    r.queue_s = ParseDouble(f[i++], where);
    r.cold_start_s = ParseDouble(f[i++], where);
    r.exec_s = ParseDouble(f[i++], where);
    r.e2e_s = ParseDouble(f[i++], where);
    r.slo_met = ParseBool(f[i++], where);
    r.max_vcpus_used = ParseDouble(f[i++], where);
    r.peak_mem_mb = ParseDouble(f[i++], where);
    r.oom_killed = ParseBool(f[i++], where);
    r.timeout = ParseBool(f[i++], where);
    table.rows.push_back(std::move(r));
  }
  return table;
}

ResultsTable LoadResultsCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open results '" + path.string() + "'");
  return ReadResultsCsv(in, path.string());
}

}  // namespace rightsizer
