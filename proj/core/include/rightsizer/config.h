#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "rightsizer/simulator.h"

namespace rightsizer {

// Everything one experiment run needs. Defaults describe a 16-worker cluster
// with 90 user vCPUs and 128000 MB per worker at a 1.4x SLO multiplier.
struct RunConfig {
  SimConfig sim;
  double slo_multiplier = 1.4;
  double target_rps = 6.0;
  int window_minutes = 10;
  std::filesystem::path trace_path;
  std::filesystem::path catalog_path;
  // Optional `t_s,function,input_id` replay; when set the trace is unused.
  std::filesystem::path schedule_path;
  std::filesystem::path output_dir = "out";

  uint64_t seed() const { return sim.seed; }
};

// Flat `key = value` text, '#' comments. Relative paths resolve against
// `base_dir`. Throws InputError on unknown keys or bad values.
RunConfig ParseRunConfig(std::istream& in, const std::filesystem::path& base_dir,
                         std::string_view source = "config");
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Sets one key; the same keys as the file format.
void SetConfigValue(RunConfig& config, std::string_view key,
                    std::string_view value,
                    const std::filesystem::path& base_dir = {});

// Checks cross-field constraints. Throws InputError.
void ValidateRunConfig(const RunConfig& config);

// Every key the file format accepts, in documentation order.
const std::vector<std::string>& ConfigKeys();

// Simulation parameters as `key=value` pairs. File locations and the audit
// switch are left out so results metadata does not depend on where inputs
// live.
std::vector<std::pair<std::string, std::string>> DescribeRunConfig(
    const RunConfig& config);

}  // namespace rightsizer
