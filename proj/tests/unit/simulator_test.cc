#include "rightsizer/simulator.h"

#include <gtest/gtest.h>

#include <sstream>

#include "rightsizer/config.h"
#include "rightsizer/error.h"
#include "rightsizer/experiment.h"
#include "rightsizer/results.h"
#include "rightsizer/workload.h"
#include "test_util.h"

namespace rightsizer {
namespace {

using testing::CatalogFrom;

Schedule At(std::initializer_list<double> times, const char* function,
            const char* input) {
  Schedule s;
  for (double t : times) s.arrivals.push_back({t, function, input});
  return s;
}

ResultsTable RunOne(const Catalog& c, const Schedule& s, SimConfig cfg = {},
                    RunStats* stats = nullptr) {
  Simulator sim(cfg, c, BuildSloTable(c, 1.4));
  ResultsTable r = sim.Run(s);
  if (stats) *stats = sim.stats();
  return r;
}

TEST(Simulator, EmptyScheduleGivesEmptyResults) {
  Catalog c = CatalogFrom(
      "function name=f input_type=payload work_a=0 work_c=2\n"
      "input function=f id=i value=1\n");
  EXPECT_TRUE(RunOne(c, Schedule{}).rows.empty());
}

TEST(Simulator, ColdStartAndFeaturizationAddUp) {
  Catalog c = CatalogFrom(
      "function name=f input_type=matrix trigger=storage work_a=0 work_c=2 "
      "cold_start_ms=500\n"
      "input function=f id=i size_bytes=10 featurize_cost_ms=27 rows=1 cols=1 "
      "density=1\n");
  ResultsTable r = RunOne(c, At({0.0}, "f", "i"));
  ASSERT_EQ(r.rows.size(), 1u);
  const ResultRow& row = r.rows[0];
  EXPECT_EQ(row.placement, PlacementKind::kCold);
  EXPECT_DOUBLE_EQ(row.cold_start_s, 0.5);
  EXPECT_DOUBLE_EQ(row.exec_s, 2.0);
  EXPECT_NEAR(row.e2e_s, 2.527, 1e-12);
  EXPECT_EQ(row.alloc_vcpus, 16);
  EXPECT_EQ(row.alloc_mem_mb, 4096);
}

TEST(Simulator, SecondInvocationReusesWarmContainer) {
  Catalog c = CatalogFrom(
      "function name=f input_type=payload work_a=0 work_c=1\n"
      "input function=f id=i value=1\n");
  ResultsTable r = RunOne(c, At({0.0, 10.0}, "f", "i"));
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[1].placement, PlacementKind::kWarmExact);
  EXPECT_EQ(r.rows[1].cold_start_s, 0.0);
  EXPECT_DOUBLE_EQ(r.rows[1].e2e_s, 1.0);
}

TEST(Simulator, ContentionReintegratesRemainingWork) {
  // Width 1 each on a one-core worker: overlap halves both rates.
  Catalog c = CatalogFrom(
      "function name=f input_type=payload work_a=0 work_c=2 cold_start_ms=0\n"
      "input function=f id=i value=1\n");
  SimConfig cfg;
  cfg.scheduler.num_workers = 1;
  cfg.worker_cores = 1.0;
  RunStats stats;
  ResultsTable r = RunOne(c, At({0.0, 1.0}, "f", "i"), cfg, &stats);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_NEAR(r.rows[0].exec_s, 3.0, 1e-9);
  EXPECT_NEAR(r.rows[1].exec_s, 3.0, 1e-9);
  EXPECT_NEAR(r.rows[1].arrival_s + r.rows[1].e2e_s, 4.0, 1e-9);
  EXPECT_DOUBLE_EQ(stats.max_contention, 2.0);
  EXPECT_LT(stats.max_work_error, 1e-9);
}

TEST(Simulator, OomKillAtRampCrossing) {
  // Peak 8192 MB against the 4096 MB default: killed halfway through.
  Catalog c = CatalogFrom(
      "function name=f input_type=payload work_a=0 work_c=4 mem_base_mb=0 "
      "mem_per_byte=8192\n"
      "input function=f id=i size_bytes=1 value=1\n");
  ResultsTable r = RunOne(c, At({0.0}, "f", "i"));
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_TRUE(r.rows[0].oom_killed);
  EXPECT_FALSE(r.rows[0].slo_met);
  EXPECT_NEAR(r.rows[0].exec_s, 2.0, 1e-9);
}

TEST(Simulator, TimeoutCountsFromExecStart) {
  Catalog c = CatalogFrom(
      "function name=f input_type=payload work_a=0 work_c=30 timeout_s=5\n"
      "input function=f id=i value=1\n");
  ResultsTable r = RunOne(c, At({0.0}, "f", "i"));
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_TRUE(r.rows[0].timeout);
  EXPECT_FALSE(r.rows[0].slo_met);
  EXPECT_NEAR(r.rows[0].exec_s, 5.0, 1e-9);
}

TEST(Simulator, QueuedInvocationsWaitForCapacity) {
  // One worker, 16 vCPUs of room, two overlapping 16-vCPU requests.
  Catalog c = CatalogFrom(
      "function name=f input_type=payload work_a=0 work_c=3 cold_start_ms=0\n"
      "input function=f id=i value=1\n");
  SimConfig cfg;
  cfg.scheduler.num_workers = 1;
  cfg.scheduler.user_cpu = 16;
  RunStats stats;
  ResultsTable r = RunOne(c, At({0.0, 1.0}, "f", "i"), cfg, &stats);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_NEAR(r.rows[1].queue_s, 2.0, 1e-9);
  EXPECT_EQ(r.rows[1].placement, PlacementKind::kWarmExact);
  EXPECT_EQ(stats.capacity_violations, 0u);
  EXPECT_EQ(stats.queued_invocations, 1u);
}

TEST(Simulator, DemoRunKeepsInvariantsAndIsDeterministic) {
  RunConfig cfg = LoadRunConfig(testing::DataDir() / "demo.conf");
  cfg.target_rps = 3;
  cfg.sim.scheduler.user_cpu = 130;
  RunArtifacts a = RunExperiment(cfg);
  RunArtifacts b = RunExperiment(cfg);
  std::stringstream sa, sb;
  WriteResultsCsv(a.results, sa);
  WriteResultsCsv(b.results, sb);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.stats.audit_failures, 0u);
  EXPECT_EQ(a.stats.capacity_violations, 0u);
  EXPECT_EQ(a.stats.clock_regressions, 0u);
  EXPECT_LE(a.stats.max_active_vcpus, 130);
  EXPECT_LT(a.stats.max_work_error, 1e-6);
  EXPECT_EQ(a.results.rows.size(), 1800u);
}

TEST(Simulator, RunTwiceIsRejected) {
  Catalog c = CatalogFrom(
      "function name=f input_type=payload work_a=0 work_c=1\n"
      "input function=f id=i value=1\n");
  Simulator sim(SimConfig{}, c, BuildSloTable(c, 1.4));
  sim.Run(Schedule{});
  EXPECT_ANY_THROW(sim.Run(Schedule{}));
}

TEST(Simulator, UnknownFunctionIsInputError) {
  Catalog c = CatalogFrom(
      "function name=f input_type=payload work_a=0 work_c=1\n"
      "input function=f id=i value=1\n");
  Simulator sim(SimConfig{}, c, BuildSloTable(c, 1.4));
  EXPECT_THROW(sim.Run(At({0.0}, "g", "i")), InputError);
}

}  // namespace
}  // namespace rightsizer
