#include "rightsizer/workload.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>

#include "rightsizer/csv.h"
#include "rightsizer/error.h"
#include "rightsizer/perf_model.h"

namespace rightsizer {
namespace {

constexpr int kWindowRetries = 16;

}  // namespace

uint64_t Trace::MinuteTotal(int minute) const {
  uint64_t total = 0;
  for (const auto& row : rows) total += row.counts[static_cast<size_t>(minute)];
  return total;
}

Trace LoadTrace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trace '" + path.string() + "'");
  return ParseTrace(in, path.string());
}

Trace ParseTrace(std::istream& in, std::string_view source) {
  Trace trace;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    auto fields = SplitCsvLine(line);
    if (fields.size() != kMinutesPerDay + 1) {
      throw InputError(where + ": expected " + std::to_string(kMinutesPerDay + 1) +
                       " columns, got " + std::to_string(fields.size()));
    }
    if (!header_seen) {
      if (Trim(fields[0]) != "function_hash" || Trim(fields[1]) != "m1") {
        throw InputError(where + ": header must be function_hash,m1,...,m1440");
      }
      header_seen = true;
      continue;
    }
    TraceRow row;
    row.function_hash = std::string(Trim(fields[0]));
    row.counts.reserve(kMinutesPerDay);
    for (int m = 0; m < kMinutesPerDay; ++m) {
      int64_t count = ParseInt(fields[m + 1], where + " m" + std::to_string(m + 1));
      if (count < 0) {
        throw InputError(where + ": negative count in m" + std::to_string(m + 1));
      }
      row.counts.push_back(static_cast<uint32_t>(count));
    }
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

void WriteTrace(const Trace& trace, std::ostream& out) {
  out << "function_hash";
  for (int m = 1; m <= kMinutesPerDay; ++m) out << ",m" << m;
  out << '\n';
  for (const auto& row : trace.rows) {
    out << row.function_hash;
    for (uint32_t c : row.counts) out << ',' << c;
    out << '\n';
  }
}

Trace SynthesizeTrace(int num_functions, double mean_per_minute, uint64_t seed) {
  if (num_functions < 1 || !(mean_per_minute > 0.0)) {
    throw InputError("trace synthesis needs functions >= 1 and a positive rate");
  }
  Rng rng(seed);
  Trace trace;
  for (int f = 0; f < num_functions; ++f) {
    // Log-uniform spread of per-function popularity around the mean.
    double rate = mean_per_minute * std::exp(rng.Uniform(-1.0, 1.0));
    double phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);
    TraceRow row;
    char name[32];
    std::snprintf(name, sizeof(name), "fn%04d%08llx", f,
                  static_cast<unsigned long long>(rng.UniformInt(0, 0xffffffffll)));
    row.function_hash = name;
    row.counts.reserve(kMinutesPerDay);
    for (int m = 0; m < kMinutesPerDay; ++m) {
      double diurnal = 1.0 + 0.3 * std::sin(2.0 * std::numbers::pi * m / kMinutesPerDay + phase);
      row.counts.push_back(static_cast<uint32_t>(rng.Poisson(rate * diurnal)));
    }
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

std::vector<size_t> SubsampleIndices(size_t n, size_t keep, Rng& rng) {
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  if (keep >= n) return idx;
  // Partial Fisher-Yates: the first `keep` slots are a uniform subset.
  for (size_t i = 0; i < keep; ++i) {
    size_t j = static_cast<size_t>(rng.UniformInt(static_cast<int64_t>(i),
                                                  static_cast<int64_t>(n - 1)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Schedule GenerateSchedule(const Trace& trace, double target_rps, uint64_t seed,
                          const Catalog& catalog, int window_minutes) {
  if (!(target_rps > 0.0)) throw InputError("target_rps must be > 0");
  if (catalog.num_pairs() == 0) throw InputError("catalog has no inputs");
  if (window_minutes < 1 || window_minutes > kMinutesPerDay) {
    throw InputError("window_minutes must be in [1, 1440]");
  }
  if (trace.rows.empty()) throw InputError("trace is empty");

  std::vector<std::pair<const CatalogFunction*, const InputDescriptor*>> pairs;
  for (const auto& fn : catalog.functions()) {
    for (const auto& in : fn.inputs) pairs.emplace_back(&fn, &in);
  }

  Rng rng(seed);
  Schedule schedule;
  schedule.window_minutes = window_minutes;
  schedule.target_rps = target_rps;
  schedule.seed = seed;

  int start = -1;
  for (int attempt = 0; attempt < kWindowRetries; ++attempt) {
    int candidate = static_cast<int>(rng.UniformInt(0, kMinutesPerDay - window_minutes));
    uint64_t total = 0;
    for (int m = 0; m < window_minutes; ++m) total += trace.MinuteTotal(candidate + m);
    if (total > 0) {
      start = candidate;
      break;
    }
  }
  if (start < 0) {
    throw InputError("no invocations in any sampled trace window after " +
                     std::to_string(kWindowRetries) + " attempts");
  }
  schedule.window_start_minute = start;

  const auto per_minute = static_cast<size_t>(std::llround(target_rps * 60.0));
  std::vector<double> starts;
  for (int m = 0; m < window_minutes; ++m) {
    const size_t n = trace.MinuteTotal(start + m);
    std::vector<double> minute(n);
    for (double& t : minute) t = 60.0 * m + rng.Uniform(0.0, 60.0);
    if (n < per_minute) schedule.supply_short = true;
    for (size_t i : SubsampleIndices(n, per_minute, rng)) starts.push_back(minute[i]);
  }
  std::sort(starts.begin(), starts.end());

  schedule.arrivals.reserve(starts.size());
  for (double t : starts) {
    const auto& [fn, in] =
        pairs[static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(pairs.size()) - 1))];
    schedule.arrivals.push_back({t, fn->profile.name, in->input_id});
  }
  return schedule;
}

void WriteScheduleCsv(const Schedule& schedule, std::ostream& out) {
  out << "t_s,function,input_id\n";
  for (const auto& a : schedule.arrivals) {
    out << FormatDouble(a.t_s) << ',' << a.function << ',' << a.input_id << '\n';
  }
}

Schedule LoadScheduleCsv(const std::filesystem::path& path, const Catalog& catalog) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open schedule '" + path.string() + "'");
  Schedule schedule;
  std::string line;
  int line_no = 0;
  double last = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    auto f = SplitCsvLine(line);
    if (f.size() != 3) throw InputError(where + ": expected t_s,function,input_id");
    if (line_no == 1 && Trim(f[0]) == "t_s") continue;
    Arrival a{ParseDouble(f[0], where + " t_s"), std::string(Trim(f[1])),
              std::string(Trim(f[2]))};
    if (!(a.t_s >= 0.0) || a.t_s < last) {
      throw InputError(where + ": arrival times must be non-negative and sorted");
    }
    catalog.GetInput(a.function, a.input_id);
    last = a.t_s;
    schedule.arrivals.push_back(std::move(a));
  }
  return schedule;
}

void SloTable::Set(const std::string& function, const std::string& input_id,
                   double slo_s) {
  if (!(slo_s > 0.0)) throw InputError("SLO must be > 0");
  slo_s_[{function, input_id}] = slo_s;
}

double SloTable::Get(std::string_view function, std::string_view input_id) const {
  auto it = slo_s_.find({std::string(function), std::string(input_id)});
  if (it == slo_s_.end()) {
    throw InputError("no SLO for " + std::string(function) + "/" +
                     std::string(input_id));
  }
  return it->second;
}

double MedianIsolatedExecTime(const FunctionProfile& profile,
                              const InputDescriptor& input, int c_max) {
  std::vector<double> values;
  values.reserve(static_cast<size_t>(c_max));
  for (int k = 1; k <= c_max; ++k) values.push_back(ExecTime(profile, input, k, 1.0));
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

SloTable BuildSloTable(const Catalog& catalog, double multiplier, int c_max) {
  if (!(multiplier > 0.0)) throw InputError("slo multiplier must be > 0");
  SloTable table;
  table.multiplier = multiplier;
  for (const auto& fn : catalog.functions()) {
    for (const auto& in : fn.inputs) {
      table.Set(fn.profile.name, in.input_id,
                multiplier * MedianIsolatedExecTime(fn.profile, in, c_max));
    }
  }
  return table;
}

}  // namespace rightsizer
