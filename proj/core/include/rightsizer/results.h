#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rightsizer/scheduler.h"

namespace rightsizer {

// One simulated invocation. Times are seconds unless the name says ms.
struct ResultRow {
  uint64_t invocation = 0;
  double arrival_s = 0.0;
  std::string function;
  std::string input_id;
  double slo_s = 0.0;
  double featurize_ms = 0.0;
  // Allocator's decision.
  int alloc_vcpus = 0;
  int alloc_mem_mb = 0;
  bool vcpu_from_model = false;
  bool mem_from_model = false;
  PlacementKind placement = PlacementKind::kRejected;
  int worker = -1;
  // Size of the container the invocation actually ran in.
  int container_vcpus = 0;
  int container_mem_mb = 0;
  double queue_s = 0.0;
  double cold_start_s = 0.0;
  double exec_s = 0.0;
  double e2e_s = 0.0;
  bool slo_met = false;
  double max_vcpus_used = 0.0;
  double peak_mem_mb = 0.0;
  bool oom_killed = false;
  bool timeout = false;

  bool completed() const {
    return placement != PlacementKind::kRejected && !oom_killed && !timeout;
  }
};

struct ResultsTable {
  // Written as `# key=value` lines ahead of the CSV header.
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ResultRow> rows;
};

void WriteResultsCsv(const ResultsTable& table, std::ostream& out);
ResultsTable ReadResultsCsv(std::istream& in, std::string_view source = "results");
ResultsTable LoadResultsCsv(const std::filesystem::path& path);

}  // namespace rightsizer
