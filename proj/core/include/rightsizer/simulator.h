#pragma once

#include <cstdint>
#include <memory>

#include "rightsizer/allocator.h"
#include "rightsizer/catalog.h"
#include "rightsizer/results.h"
#include "rightsizer/scheduler.h"
#include "rightsizer/workload.h"

namespace rightsizer {

struct SimConfig {
  AllocatorConfig allocator;
  SchedulerConfig scheduler;
  // Physical cores per worker. Busy containers whose combined parallel width
  // exceeds this run proportionally slower. userCPU (scheduler.user_cpu) may
  // be set above it to oversubscribe.
  double worker_cores = 96.0;
  double evict_sweep_s = 60.0;
  // Run Scheduler::Audit after every event and count failures.
  bool audit_every_event = true;
  uint64_t seed = 1;
};

// Invariant bookkeeping collected while a run executes.
struct RunStats {
  uint64_t events = 0;
  uint64_t audit_failures = 0;
  uint64_t capacity_violations = 0;
  uint64_t clock_regressions = 0;
  int max_active_vcpus = 0;
  double max_contention = 1.0;
  // Largest relative gap between integrated progress and nominal work at
  // completion, across all completed invocations.
  double max_work_error = 0.0;
  uint64_t warm_larger_placements = 0;
  uint64_t background_launches = 0;
  uint64_t containers_created = 0;
  uint64_t queued_invocations = 0;
  uint64_t vcpu_feedbacks = 0;
  uint64_t mem_feedbacks = 0;
};

// Discrete-event simulation of one run: arrival, featurization, allocation,
// placement, cold start, contended execution, OOM kills, timeouts, keep-alive
// eviction, and completion feedback into the allocator.
//
// Single-threaded. Output depends only on (config, catalog, SLOs, schedule).
class Simulator {
 public:
  Simulator(SimConfig config, const Catalog& catalog, const SloTable& slos);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  // May be called once. Throws InputError for arrivals naming unknown
  // functions or inputs and SimulationError for internal inconsistencies.
  ResultsTable Run(const Schedule& schedule);

  const RunStats& stats() const;
  const Allocator& allocator() const;
  const Scheduler& scheduler() const;

 private:
  class Engine;
  std::unique_ptr<Engine> engine_;
};

}  // namespace rightsizer
