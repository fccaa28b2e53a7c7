#pragma once

#include <optional>
#include <string>

#include "rightsizer/featurizer.h"

namespace rightsizer {

// Synthetic performance and memory model of one serverless function.
//
// Single-core work for an input is W(s) = a * s^b + c seconds, where s is
// the input's `scale_attr` (or its size in bytes when scale_attr is
// "size_bytes"). Execution follows Amdahl's law capped at k_sat usable
// vCPUs. Memory ramps linearly from mem_base_mb to the peak footprint.
struct FunctionProfile {
  std::string name;
  InputType input_type = InputType::kPayload;
  Trigger trigger = Trigger::kApi;
  double work_a = 1.0;
  double work_b = 1.0;
  double work_c = 0.0;
  std::string scale_attr = "size_bytes";
  double parallel_fraction = 0.0;
  int k_sat = 1;
  double mem_base_mb = 64.0;
  double mem_per_byte = 0.0;  // MB of footprint per input byte
  double cold_start_ms = 500.0;
  double timeout_s = 300.0;
};

// Throws InputError when a profile parameter is out of range.
void ValidateProfile(const FunctionProfile& profile);

double ScaleValue(const FunctionProfile& profile, const InputDescriptor& input);

// Single-core seconds of work W(s).
double WorkSeconds(const FunctionProfile& profile, const InputDescriptor& input);

int EffectiveVcpus(const FunctionProfile& profile, int vcpus);

// Average number of busy vCPUs while executing: 1 + p * (k_eff - 1).
double ParallelWidth(const FunctionProfile& profile, int vcpus);

// Width as reported by the utilization daemon, rounded to one decimal.
double MaxVcpusUsed(const FunctionProfile& profile, int vcpus);

// Execution time at `vcpus` under a uniform slowdown `contention_factor`.
double ExecTime(const FunctionProfile& profile, const InputDescriptor& input,
                int vcpus, double contention_factor = 1.0);

// Proportional-share slowdown of a worker: max(1, demand / cores).
double ContentionFactor(double demand, double cores);

struct MemoryFootprint {
  double base_mb = 0.0;
  double peak_mb = 0.0;

  // Fraction of the invocation's progress at which the linear ramp crosses
  // `alloc_mb`, or nullopt if the footprint always fits.
  std::optional<double> KillFraction(double alloc_mb) const;
};

MemoryFootprint Footprint(const FunctionProfile& profile,
                          const InputDescriptor& input);

// Brute-force smallest vCPU count in [1, c_max] meeting `slo_s` without
// contention; nullopt when no count does.
std::optional<int> OracleMinVcpus(const FunctionProfile& profile,
                                  const InputDescriptor& input, double slo_s,
                                  int c_max = 32);

// Smallest 128 MB memory class holding the peak footprint.
int MinMemoryClass(const FunctionProfile& profile, const InputDescriptor& input);

}  // namespace rightsizer
