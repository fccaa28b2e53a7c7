#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rightsizer/catalog.h"
#include "rightsizer/rng.h"

namespace rightsizer {

inline constexpr int kMinutesPerDay = 1440;

// Per-minute invocation counts for one function over a day.
struct TraceRow {
  std::string function_hash;
  std::vector<uint32_t> counts;
};

// CSV with header `function_hash,m1,...,m1440`.
struct Trace {
  std::vector<TraceRow> rows;

  uint64_t MinuteTotal(int minute) const;
};

Trace LoadTrace(const std::filesystem::path& path);
Trace ParseTrace(std::istream& in, std::string_view source = "trace");
void WriteTrace(const Trace& trace, std::ostream& out);

// Synthetic stand-in for the public trace: Poisson minute counts around a
// per-function rate with a mild diurnal swing.
Trace SynthesizeTrace(int num_functions, double mean_per_minute, uint64_t seed);

struct Arrival {
  double t_s = 0.0;
  std::string function;
  std::string input_id;
};

struct Schedule {
  std::vector<Arrival> arrivals;
  int window_minutes = 10;
  int window_start_minute = 0;
  double target_rps = 0.0;
  uint64_t seed = 0;
  // Some minute of the window held fewer starts than target_rps * 60.
  bool supply_short = false;
};

// Uniformly chosen subset of `keep` indices out of [0, n), ascending.
std::vector<size_t> SubsampleIndices(size_t n, size_t keep, Rng& rng);

// Picks a random window from the trace, draws uniform start times within
// each minute, thins them to target_rps, and assigns each start a uniformly
// random (function, input) pair from the catalog.
Schedule GenerateSchedule(const Trace& trace, double target_rps, uint64_t seed,
                          const Catalog& catalog, int window_minutes = 10);

// Replay format: `t_s,function,input_id`.
void WriteScheduleCsv(const Schedule& schedule, std::ostream& out);
Schedule LoadScheduleCsv(const std::filesystem::path& path,
                         const Catalog& catalog);

// Per (function, input) SLO: multiplier times the median isolated execution
// time over vCPU counts 1..c_max.
class SloTable {
 public:
  double multiplier = 1.4;

  void Set(const std::string& function, const std::string& input_id,
           double slo_s);
  double Get(std::string_view function, std::string_view input_id) const;
  const std::map<std::pair<std::string, std::string>, double>& entries() const {
    return slo_s_;
  }

 private:
  std::map<std::pair<std::string, std::string>, double> slo_s_;
};

// Median of the isolation sweep; the mean of the middle two for an even
// count.
double MedianIsolatedExecTime(const FunctionProfile& profile,
                              const InputDescriptor& input, int c_max = 32);

SloTable BuildSloTable(const Catalog& catalog, double multiplier,
                       int c_max = 32);

}  // namespace rightsizer
