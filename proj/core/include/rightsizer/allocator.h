#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "rightsizer/learner.h"

namespace rightsizer {

inline constexpr int kMemoryClassMb = 128;

enum class CostMode { kAbsolute, kProportional };

std::string_view ToString(CostMode mode);

// Where allocations come from. The static policies reproduce the fixed
// medium/large baselines and never consult a model.
enum class AllocationPolicy { kLearned, kStaticMedium, kStaticLarge };

std::string_view ToString(AllocationPolicy policy);

struct AllocatorConfig {
  AllocationPolicy policy = AllocationPolicy::kLearned;
  CostMode cost_mode = CostMode::kAbsolute;
  int vcpu_conf_threshold = 10;
  int mem_conf_threshold = 20;
  int default_vcpus = 16;
  int default_mem_mb = 4096;
  // Absolute mode: one extra vCPU per x_s of deficit, one fewer per y_s of
  // slack.
  double x_s = 0.5;
  double y_s = 1.5;
  double vcpu_alpha_over = 1.0;
  double vcpu_alpha_under = 2.0;
  double mem_alpha_over = 1.0;
  double mem_alpha_under = 4.0;
  // Violations below this utilization are blamed on something other than
  // the vCPU allocation.
  double high_utilization = 0.9;
  int c_max = 32;
  int mem_max_mb = 4096;
  double learning_rate = CsoaaModel::kDefaultLearningRate;

  int mem_classes() const { return mem_max_mb / kMemoryClassMb; }
};

// Throws InputError when thresholds, defaults or bounds are inconsistent.
void ValidateAllocatorConfig(const AllocatorConfig& config);

struct Allocation {
  int vcpus = 1;
  int memory_mb = kMemoryClassMb;
  bool vcpu_from_model = false;
  bool mem_from_model = false;

  int memory_class() const { return memory_mb / kMemoryClassMb; }
};

// What the utilization daemon reports for one finished invocation.
struct InvocationOutcome {
  std::string function;
  FeatureVector features;
  double slo_s = 0.0;
  // Resources the invocation actually ran with (its container's size).
  Allocation alloc;
  double exec_s = 0.0;
  double e2e_s = 0.0;
  double max_vcpus_used = 0.0;
  double peak_mem_mb = 0.0;
  bool oom_killed = false;
};

// Target vCPU class and cost vector for a completed, non-OOM outcome.
// Throws std::invalid_argument for oom-killed outcomes.
CostVector BuildVcpuCostVector(const InvocationOutcome& outcome,
                               const AllocatorConfig& config);

CostVector BuildMemoryCostVector(const InvocationOutcome& outcome,
                                 const AllocatorConfig& config);

// Falls back to `default_mem_mb` unless the prediction exceeds the total
// size of the invocation's input objects.
int SafeguardMemory(int predicted_mb, uint64_t input_total_bytes,
                    int default_mem_mb);

struct FunctionLearnerState {
  FunctionLearnerState(int feature_dim, const AllocatorConfig& config);

  // Input features followed by the SLO.
  CsoaaModel vcpu_model;
  // Input features only.
  CsoaaModel mem_model;
  uint64_t completed_feedbacks = 0;
};

// Per-function vCPU and memory learners plus the cost functions that train
// them from completion feedback.
class Allocator {
 public:
  explicit Allocator(AllocatorConfig config);

  // One model pair per function. Re-registering is a no-op if the dimension
  // matches and an error otherwise.
  void RegisterFunction(const std::string& function, int feature_dim);

  // Throws std::out_of_range for unknown functions and
  // std::invalid_argument for a non-positive SLO.
  Allocation Allocate(std::string_view function, const FeatureVector& features,
                      double slo_s, uint64_t input_total_bytes);

  void Feedback(const InvocationOutcome& outcome);

  const FunctionLearnerState& state(std::string_view function) const;
  const AllocatorConfig& config() const { return config_; }

 private:
  FunctionLearnerState& MutableState(std::string_view function);

  AllocatorConfig config_;
  std::map<std::string, std::unique_ptr<FunctionLearnerState>, std::less<>>
      functions_;
};

}  // namespace rightsizer
