#include "rightsizer/config.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "rightsizer/catalog.h"
#include "rightsizer/error.h"
#include "rightsizer/experiment.h"
#include "rightsizer/perf_model.h"
#include "test_util.h"

namespace rightsizer {
namespace {

TEST(RunConfig, DefaultsMatchTheDocumentedCluster) {
  RunConfig c;
  EXPECT_EQ(c.sim.scheduler.num_workers, 16);
  EXPECT_EQ(c.sim.scheduler.user_cpu, 90);
  EXPECT_EQ(c.sim.scheduler.worker_memory_mb, 128000);
  EXPECT_EQ(c.sim.allocator.vcpu_conf_threshold, 10);
  EXPECT_EQ(c.sim.allocator.mem_conf_threshold, 20);
  EXPECT_EQ(c.sim.allocator.default_vcpus, 16);
  EXPECT_EQ(c.sim.allocator.default_mem_mb, 4096);
  EXPECT_DOUBLE_EQ(c.slo_multiplier, 1.4);
}

TEST(RunConfig, ParsesEveryDocumentedKey) {
  std::istringstream in(
      "# comment\n"
      "num_workers = 4\nuser_cpu=130\nscheduler_policy = packing\n"
      "cost_mode = proportional\nslo_multiplier = 1.8\nseed = 7\n"
      "allocation_policy = static_large\nmem_max_mb = 8192\n"
      "trace = t.csv\ncatalog = /abs/c.txt\n");
  RunConfig c = ParseRunConfig(in, "/base");
  EXPECT_EQ(c.sim.scheduler.num_workers, 4);
  EXPECT_EQ(c.sim.scheduler.user_cpu, 130);
  EXPECT_EQ(c.sim.scheduler.policy, SchedulerPolicy::kPacking);
  EXPECT_EQ(c.sim.allocator.cost_mode, CostMode::kProportional);
  EXPECT_EQ(c.sim.allocator.policy, AllocationPolicy::kStaticLarge);
  EXPECT_DOUBLE_EQ(c.slo_multiplier, 1.8);
  EXPECT_EQ(c.seed(), 7u);
  EXPECT_EQ(c.trace_path, std::filesystem::path("/base/t.csv"));
  EXPECT_EQ(c.catalog_path, std::filesystem::path("/abs/c.txt"));
  const std::set<std::string> omitted{"audit", "trace", "catalog", "schedule", "out"};
  for (const std::string& key : ConfigKeys()) {
    if (omitted.count(key)) continue;
    bool described = false;
    for (const auto& [k, v] : DescribeRunConfig(c)) described |= k == key;
    EXPECT_TRUE(described) << key;
  }
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  std::istringstream unknown("colour = blue\n");
  EXPECT_THROW(ParseRunConfig(unknown, "."), InputError);
  std::istringstream bad_int("num_workers = many\n");
  EXPECT_THROW(ParseRunConfig(bad_int, "."), InputError);
  std::istringstream no_eq("num_workers 4\n");
  EXPECT_THROW(ParseRunConfig(no_eq, "."), InputError);
  RunConfig c;
  c.sim.scheduler.num_workers = 0;
  EXPECT_THROW(ValidateRunConfig(c), InputError);
  EXPECT_THROW(LoadRunConfig("/nonexistent/run.conf"), InputError);
}

TEST(Catalog, DemoCatalogLoads) {
  Catalog c = Catalog::Load(testing::DataDir() / "demo_catalog.txt");
  EXPECT_EQ(c.functions().size(), 10u);
  EXPECT_GE(c.num_pairs(), 30u);
  EXPECT_NO_THROW(c.GetInput("matmult", "mm-4000"));
}

TEST(Catalog, RejectsBadRecords) {
  EXPECT_THROW(testing::CatalogFrom("function input_type=payload\n"), InputError);
  EXPECT_THROW(testing::CatalogFrom("input function=nope id=x value=1\n"), InputError);
  EXPECT_THROW(testing::CatalogFrom("function name=f input_type=payload bogus=1\n"),
               InputError);
  EXPECT_THROW(testing::CatalogFrom("function name=f input_type=payload\n"
                                    "function name=f input_type=payload\n"),
               InputError);
  EXPECT_THROW(testing::CatalogFrom("function name=f input_type=matrix\n"
                                    "input function=f id=x rows=1\n"),
               InputError);
}

TEST(Oracle, TableFlagsInfeasiblePairs) {
  Catalog c = testing::CatalogFrom(
      "function name=p input_type=payload work_a=0 work_c=32 parallel_fraction=1 "
      "k_sat=16\n"
      "input function=p id=i value=1\n");
  auto rows = BuildOracleTable(c, 1.4, 32, 32);
  ASSERT_EQ(rows.size(), 1u);
  ASSERT_TRUE(rows[0].min_vcpus.has_value());
  EXPECT_LE(ExecTime(c.functions()[0].profile, c.functions()[0].inputs[0],
                     *rows[0].min_vcpus),
            rows[0].slo_s);
  std::ostringstream out;
  WriteOracleCsv(rows, out);
  EXPECT_NE(out.str().find("p,i,"), std::string::npos);
}

TEST(Sweep, AxisNamesAndValues) {
  EXPECT_EQ(ParseSweepAxis("user_cpu"), SweepAxis::kUserCpu);
  EXPECT_FALSE(ParseSweepAxis("colour"));
  RunConfig c;
  ApplySweepValue(c, SweepAxis::kRps, "3.5");
  EXPECT_DOUBLE_EQ(c.target_rps, 3.5);
  ApplySweepValue(c, SweepAxis::kSchedulerPolicy, "memory_centric_baseline");
  EXPECT_EQ(c.sim.scheduler.policy, SchedulerPolicy::kMemoryCentric);
  EXPECT_THROW(ApplySweepValue(c, SweepAxis::kCostMode, "relative"), InputError);
}

TEST(Sweep, RowsFollowValueOrder) {
  RunConfig c = LoadRunConfig(testing::DataDir() / "demo.conf");
  c.window_minutes = 2;
  auto rows = RunSweep(c, SweepAxis::kRps, {"1", "2", "3"}, 2, std::nullopt);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].value, "1");
  EXPECT_EQ(rows[0].metrics.invocations, 120u);
  EXPECT_EQ(rows[2].metrics.invocations, 360u);
  std::ostringstream out;
  WriteSweepSummary(SweepAxis::kRps, rows, out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

}  // namespace
}  // namespace rightsizer
