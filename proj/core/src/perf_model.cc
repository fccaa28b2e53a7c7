#include "rightsizer/perf_model.h"

#include <algorithm>
#include <cmath>

#include "rightsizer/error.h"

namespace rightsizer {

void ValidateProfile(const FunctionProfile& p) {
  const std::string where = "function '" + p.name + "': ";
  if (p.name.empty()) throw InputError("function profile without a name");
  if (!(p.parallel_fraction >= 0.0 && p.parallel_fraction <= 1.0)) {
    throw InputError(where + "parallel_fraction must be in [0, 1]");
  }
  if (p.k_sat < 1) throw InputError(where + "k_sat must be >= 1");
  if (!(p.work_a >= 0.0) || !(p.work_c >= 0.0) || !std::isfinite(p.work_b)) {
    throw InputError(where + "work coefficients must be non-negative");
  }
  if (!(p.mem_base_mb >= 0.0) || !(p.mem_per_byte >= 0.0)) {
    throw InputError(where + "memory model must be non-negative");
  }
  if (!(p.cold_start_ms >= 0.0)) {
    throw InputError(where + "cold_start_ms must be non-negative");
  }
  if (!(p.timeout_s > 0.0)) throw InputError(where + "timeout_s must be > 0");
  if (p.scale_attr != "size_bytes") {
    const auto& fields = SchemaFor(p.input_type).fields;
    bool known = std::any_of(fields.begin(), fields.end(), [&](const auto& f) {
      return f.name == p.scale_attr && f.kind != FieldKind::kCategory;
    });
    if (!known) {
      throw InputError(where + "scale_attr '" + p.scale_attr +
                       "' is not a numeric field of its input type");
    }
  }
}

double ScaleValue(const FunctionProfile& profile, const InputDescriptor& input) {
  if (profile.scale_attr == "size_bytes") {
    return static_cast<double>(input.size_bytes);
  }
  auto it = input.attrs.find(profile.scale_attr);
  if (it == input.attrs.end() || !std::holds_alternative<double>(it->second)) {
    throw InputError("input '" + input.input_id + "' lacks scale attr '" +
                     profile.scale_attr + "'");
  }
  return std::get<double>(it->second);
}

double WorkSeconds(const FunctionProfile& profile, const InputDescriptor& input) {
  double s = ScaleValue(profile, input);
  return profile.work_a * std::pow(s, profile.work_b) + profile.work_c;
}

int EffectiveVcpus(const FunctionProfile& profile, int vcpus) {
  return std::max(1, std::min(vcpus, profile.k_sat));
}

double ParallelWidth(const FunctionProfile& profile, int vcpus) {
  return 1.0 + profile.parallel_fraction * (EffectiveVcpus(profile, vcpus) - 1);
}

double MaxVcpusUsed(const FunctionProfile& profile, int vcpus) {
  double used = std::round(ParallelWidth(profile, vcpus) * 10.0) / 10.0;
  return std::min(used, static_cast<double>(std::max(vcpus, 1)));
}

double ExecTime(const FunctionProfile& profile, const InputDescriptor& input,
                int vcpus, double contention_factor) {
  const double p = profile.parallel_fraction;
  const int k_eff = EffectiveVcpus(profile, vcpus);
  return WorkSeconds(profile, input) * ((1.0 - p) + p / k_eff) *
         contention_factor;
}

double ContentionFactor(double demand, double cores) {
  if (cores <= 0.0) return 1.0;
  return std::max(1.0, demand / cores);
}

std::optional<double> MemoryFootprint::KillFraction(double alloc_mb) const {
  if (peak_mb <= alloc_mb) return std::nullopt;
  if (base_mb >= alloc_mb) return 0.0;
  return (alloc_mb - base_mb) / (peak_mb - base_mb);
}

MemoryFootprint Footprint(const FunctionProfile& profile,
                          const InputDescriptor& input) {
  return {profile.mem_base_mb,
          profile.mem_base_mb +
              profile.mem_per_byte * static_cast<double>(input.size_bytes)};
}

std::optional<int> OracleMinVcpus(const FunctionProfile& profile,
                                  const InputDescriptor& input, double slo_s,
                                  int c_max) {
  for (int k = 1; k <= c_max; ++k) {
    if (ExecTime(profile, input, k, 1.0) <= slo_s) return k;
  }
  return std::nullopt;
}

int MinMemoryClass(const FunctionProfile& profile, const InputDescriptor& input) {
  double peak = Footprint(profile, input).peak_mb;
  return std::max(1, static_cast<int>(std::ceil(peak / 128.0)));
}

}  // namespace rightsizer
