#include "rightsizer/allocator.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rightsizer/error.h"

namespace rightsizer {

std::string_view ToString(CostMode mode) {
  return mode == CostMode::kAbsolute ? "absolute" : "proportional";
}

std::string_view ToString(AllocationPolicy policy) {
  switch (policy) {
    case AllocationPolicy::kLearned:
      return "learned";
    case AllocationPolicy::kStaticMedium:
      return "static_medium";
    case AllocationPolicy::kStaticLarge:
      return "static_large";
  }
  return "unknown";
}

void ValidateAllocatorConfig(const AllocatorConfig& c) {
  if (c.c_max < 2) throw InputError("c_max must be >= 2");
  if (c.mem_max_mb < 2 * kMemoryClassMb || c.mem_max_mb % kMemoryClassMb != 0) {
    throw InputError("mem_max must be a multiple of 128 and >= 256");
  }
  if (c.default_vcpus < 1 || c.default_vcpus > c.c_max) {
    throw InputError("default_vcpus must be in [1, c_max]");
  }
  if (c.default_mem_mb < kMemoryClassMb || c.default_mem_mb > c.mem_max_mb ||
      c.default_mem_mb % kMemoryClassMb != 0) {
    throw InputError("default_mem_mb must be a multiple of 128 in [128, mem_max]");
  }
  if (c.vcpu_conf_threshold < 0 || c.mem_conf_threshold < 0) {
    throw InputError("confidence thresholds must be non-negative");
  }
  if (!(c.x_s > 0.0) || !(c.y_s > 0.0)) throw InputError("x and y must be > 0");
  if (!(c.vcpu_alpha_over > 0.0) || !(c.vcpu_alpha_under > 0.0) ||
      !(c.mem_alpha_over > 0.0) || !(c.mem_alpha_under > 0.0)) {
    throw InputError("cost slopes must be > 0");
  }
  if (!(c.learning_rate >= 0.0)) throw InputError("learning_rate must be >= 0");
}

namespace {

int Clamp(int v, int lo, int hi) { return std::max(lo, std::min(v, hi)); }

// Both tolerate representation error, e.g. 1.5 / 1.5 landing just below 1.
int CeilToInt(double v) { return static_cast<int>(std::ceil(v - 1e-9)); }
int FloorToInt(double v) { return static_cast<int>(std::floor(v + 1e-9)); }

}  // namespace

CostVector BuildVcpuCostVector(const InvocationOutcome& o,
                               const AllocatorConfig& config) {
  if (o.oom_killed) {
    throw std::invalid_argument("no vCPU feedback from an OOM-killed invocation");
  }
  const int alloc = o.alloc.vcpus;
  const int used_class = Clamp(CeilToInt(o.max_vcpus_used), 1, config.c_max);
  int target;
  if (o.exec_s <= o.slo_s) {
    const double slack = o.slo_s - o.exec_s;
    int decrease =
        config.cost_mode == CostMode::kAbsolute
            ? FloorToInt(slack / config.y_s)
            : FloorToInt(alloc * slack / o.slo_s);
    target = std::max(1, alloc - decrease);
  } else if (o.max_vcpus_used < config.high_utilization * alloc ||
             o.max_vcpus_used <= 1.0) {
    // Low utilization, or nothing beyond one vCPU was ever used: more vCPUs
    // would not have helped, so learn the class that was actually used.
    target = used_class;
  } else {
    const double deficit = o.exec_s - o.slo_s;
    int increase =
        config.cost_mode == CostMode::kAbsolute
            ? CeilToInt(deficit / config.x_s)
            : CeilToInt(alloc * deficit / o.slo_s);
    target = used_class + std::max(1, increase);
  }
  target = Clamp(target, 1, config.c_max);
  return MakeLinearCostVector(config.c_max, target, config.vcpu_alpha_over,
                              config.vcpu_alpha_under);
}

CostVector BuildMemoryCostVector(const InvocationOutcome& o,
                                 const AllocatorConfig& config) {
  const int classes = config.mem_classes();
  int target;
  if (o.oom_killed) {
    // The true need is unobserved; aim at twice the class that was killed.
    target = 2 * o.alloc.memory_class();
  } else {
    target = CeilToInt(o.peak_mem_mb / kMemoryClassMb);
  }
  target = Clamp(target, 1, classes);
  return MakeLinearCostVector(classes, target, config.mem_alpha_over,
                              config.mem_alpha_under);
}

int SafeguardMemory(int predicted_mb, uint64_t input_total_bytes,
                    int default_mem_mb) {
  const uint64_t predicted_bytes =
      static_cast<uint64_t>(std::max(predicted_mb, 0)) << 20;
  return predicted_bytes <= input_total_bytes ? default_mem_mb : predicted_mb;
}

FunctionLearnerState::FunctionLearnerState(int feature_dim,
                                           const AllocatorConfig& config)
    : vcpu_model(config.c_max, feature_dim + 1, config.learning_rate),
      mem_model(config.mem_classes(), feature_dim, config.learning_rate) {}

Allocator::Allocator(AllocatorConfig config) : config_(config) {
  ValidateAllocatorConfig(config_);
}

void Allocator::RegisterFunction(const std::string& function, int feature_dim) {
  auto it = functions_.find(function);
  if (it != functions_.end()) {
    if (it->second->mem_model.dim() != feature_dim) {
      throw std::invalid_argument("function '" + function +
                                  "' re-registered with a different dimension");
    }
    return;
  }
  functions_.emplace(function,
                     std::make_unique<FunctionLearnerState>(feature_dim, config_));
}

FunctionLearnerState& Allocator::MutableState(std::string_view function) {
  auto it = functions_.find(function);
  if (it == functions_.end()) {
    throw std::out_of_range("unknown function '" + std::string(function) + "'");
  }
  return *it->second;
}

const FunctionLearnerState& Allocator::state(std::string_view function) const {
  auto it = functions_.find(function);
  if (it == functions_.end()) {
    throw std::out_of_range("unknown function '" + std::string(function) + "'");
  }
  return *it->second;
}

Allocation Allocator::Allocate(std::string_view function,
                               const FeatureVector& features, double slo_s,
                               uint64_t input_total_bytes) {
  FunctionLearnerState& st = MutableState(function);
  if (!(slo_s > 0.0)) throw std::invalid_argument("slo must be > 0");

  switch (config_.policy) {
    case AllocationPolicy::kStaticMedium:
      return {12, 3072, false, false};
    case AllocationPolicy::kStaticLarge:
      return {20, 5120, false, false};
    case AllocationPolicy::kLearned:
      break;
  }

  Allocation a{config_.default_vcpus, config_.default_mem_mb, false, false};
  if (st.completed_feedbacks >=
      static_cast<uint64_t>(config_.vcpu_conf_threshold)) {
    FeatureVector with_slo = features;
    with_slo.push_back(slo_s);
    a.vcpus = st.vcpu_model.Predict(with_slo);
    a.vcpu_from_model = true;
  }
  if (st.completed_feedbacks >=
      static_cast<uint64_t>(config_.mem_conf_threshold)) {
    int predicted = st.mem_model.Predict(features) * kMemoryClassMb;
    int guarded = SafeguardMemory(predicted, input_total_bytes, 0);
    a.mem_from_model = guarded != 0;
    a.memory_mb = a.mem_from_model ? predicted : config_.default_mem_mb;
  }
  return a;
}

void Allocator::Feedback(const InvocationOutcome& o) {
  FunctionLearnerState& st = MutableState(o.function);
  if (config_.policy == AllocationPolicy::kLearned) {
    if (!o.oom_killed) {
      FeatureVector with_slo = o.features;
      with_slo.push_back(o.slo_s);
      st.vcpu_model.Update(with_slo, BuildVcpuCostVector(o, config_));
    }
    st.mem_model.Update(o.features, BuildMemoryCostVector(o, config_));
  }
  ++st.completed_feedbacks;
}

}  // namespace rightsizer
