#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "rightsizer/allocator.h"

namespace rightsizer {
namespace {

InvocationOutcome Outcome(int alloc, double exec, double slo, double used) {
  InvocationOutcome o;
  o.function = "f";
  o.alloc = {alloc, 1024, true, true};
  o.exec_s = exec;
  o.slo_s = slo;
  o.max_vcpus_used = used;
  o.peak_mem_mb = 500;
  return o;
}

TEST(VcpuCostVector, SlackReducesByWholeYSteps) {
  AllocatorConfig cfg;
  const CostVector v = BuildVcpuCostVector(Outcome(10, 5.0, 6.5, 9.0), cfg);
  EXPECT_EQ(v.target, 9);
  EXPECT_DOUBLE_EQ(v.cost(9), 1.0);
  EXPECT_DOUBLE_EQ(v.cost(10), 2.0);
  EXPECT_DOUBLE_EQ(v.cost(8), 3.0);
}

TEST(VcpuCostVector, LowUtilizationViolationLearnsUsedClass) {
  AllocatorConfig cfg;
  EXPECT_EQ(BuildVcpuCostVector(Outcome(8, 9.0, 7.0, 4.0), cfg).target, 4);
}

TEST(VcpuCostVector, SaturatedViolationEscalates) {
  AllocatorConfig cfg;
  EXPECT_EQ(BuildVcpuCostVector(Outcome(8, 8.1, 7.0, 7.8), cfg).target, 11);
}

TEST(VcpuCostVector, ProportionalMode) {
  AllocatorConfig cfg;
  cfg.cost_mode = CostMode::kProportional;
  // 10 * 2 / 8 = 2.5 -> two classes fewer.
  EXPECT_EQ(BuildVcpuCostVector(Outcome(10, 6.0, 8.0, 9.5), cfg).target, 8);
  // 8 * 1 / 7 -> ceil(1.14) = 2 above the used class.
  EXPECT_EQ(BuildVcpuCostVector(Outcome(8, 8.0, 7.0, 7.8), cfg).target, 10);
  // Tiny deficit still adds one.
  EXPECT_EQ(BuildVcpuCostVector(Outcome(8, 7.001, 7.0, 8.0), cfg).target, 9);
}

TEST(VcpuCostVector, SingleThreadedViolationDoesNotEscalate) {
  AllocatorConfig cfg;
  EXPECT_EQ(BuildVcpuCostVector(Outcome(1, 30.0, 10.0, 1.0), cfg).target, 1);
  EXPECT_EQ(BuildVcpuCostVector(Outcome(2, 30.0, 10.0, 1.0), cfg).target, 1);
}

TEST(VcpuCostVector, ClampedToClassRange) {
  AllocatorConfig cfg;
  EXPECT_EQ(BuildVcpuCostVector(Outcome(30, 40.0, 10.0, 30.0), cfg).target, 32);
  EXPECT_EQ(BuildVcpuCostVector(Outcome(2, 1.0, 100.0, 1.0), cfg).target, 1);
}

TEST(VcpuCostVector, OomOutcomeIsRejected) {
  AllocatorConfig cfg;
  InvocationOutcome o = Outcome(4, 1.0, 2.0, 1.0);
  o.oom_killed = true;
  EXPECT_THROW(BuildVcpuCostVector(o, cfg), std::invalid_argument);
}

TEST(MemoryCostVector, Targets) {
  AllocatorConfig cfg;
  InvocationOutcome o = Outcome(4, 1.0, 2.0, 1.0);
  o.peak_mem_mb = 900;
  CostVector v = BuildMemoryCostVector(o, cfg);
  EXPECT_EQ(v.target, 8);
  EXPECT_DOUBLE_EQ(v.cost(7), 5.0);
  EXPECT_DOUBLE_EQ(v.cost(9), 2.0);
  o.peak_mem_mb = 128;
  EXPECT_EQ(BuildMemoryCostVector(o, cfg).target, 1);
  o.oom_killed = true;
  o.alloc.memory_mb = 1024;
  EXPECT_EQ(BuildMemoryCostVector(o, cfg).target, 16);
  o.alloc.memory_mb = 3072;
  EXPECT_EQ(BuildMemoryCostVector(o, cfg).target, 32);
}

TEST(Safeguard, FallsBackWhenPredictionDoesNotExceedInput) {
  EXPECT_EQ(SafeguardMemory(256, 1ull << 30, 4096), 4096);
  EXPECT_EQ(SafeguardMemory(1024, 100ull << 20, 4096), 1024);
  EXPECT_EQ(SafeguardMemory(128, 128ull << 20, 4096), 4096);
}

}  // namespace
}  // namespace rightsizer
