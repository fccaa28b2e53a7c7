#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rightsizer/rng.h"

namespace rightsizer {

using ContainerId = uint64_t;

enum class ContainerState { kWarmIdle, kBusy, kLaunching };

struct ContainerSize {
  int vcpus = 1;
  int memory_mb = 128;

  auto operator<=>(const ContainerSize&) const = default;
};

struct Container {
  ContainerId id = 0;
  std::string function;
  ContainerSize size;
  int worker = 0;
  ContainerState state = ContainerState::kLaunching;
  double idle_since = 0.0;
};

// Decoupled load of one worker. Only busy containers count; idle and
// launching containers hold no vCPU or memory.
struct WorkerState {
  int id = 0;
  int vcpu_capacity = 90;  // userCPU
  int memory_capacity_mb = 128000;
  int active_vcpus = 0;
  int active_memory_mb = 0;

  bool Fits(ContainerSize size) const {
    return active_vcpus + size.vcpus <= vcpu_capacity &&
           active_memory_mb + size.memory_mb <= memory_capacity_mb;
  }
};

enum class SchedulerPolicy { kHashing, kPacking, kMemoryCentric };

std::string_view ToString(SchedulerPolicy policy);
std::optional<SchedulerPolicy> ParseSchedulerPolicy(std::string_view name);

enum class PlacementKind {
  kWarmExact,
  kWarmLarger,
  kCold,
  // No worker has room; the caller queues the invocation. `worker` holds the
  // randomly drawn server its cold probe restarts from.
  kQueued,
  // The size exceeds a whole worker's capacity and can never run.
  kRejected,
};

std::string_view ToString(PlacementKind kind);

struct BackgroundLaunch {
  ContainerSize size;
  int worker = 0;
  ContainerId container = 0;
};

struct Placement {
  PlacementKind kind = PlacementKind::kRejected;
  ContainerId container = 0;
  int worker = -1;
  std::optional<BackgroundLaunch> background_launch;
};

struct SchedulerConfig {
  SchedulerPolicy policy = SchedulerPolicy::kHashing;
  int num_workers = 16;
  int user_cpu = 90;
  int worker_memory_mb = 128000;
  double keepalive_s = 600.0;
};

// Deterministic FNV-1a hash of the function name modulo the worker count.
int HomeServer(std::string_view function, int num_workers);

// Tracks containers and per-worker load, and places invocations on
// containers. Placements that return a container leave it busy with its
// size charged to its worker.
class Scheduler {
 public:
  // `rng` breaks the all-workers-full case and must outlive the scheduler.
  Scheduler(SchedulerConfig config, Rng* rng);

  // Dispatches to the configured policy. `probe_start` overrides the first
  // worker tried for a cold start (used when retrying queued invocations).
  Placement Route(std::string_view function, ContainerSize size, double now,
                  std::optional<int> probe_start = std::nullopt);

  // Exact warm, then closest larger warm with a background launch of the
  // exact size, then cold at the home server or the next worker with room.
  Placement RouteHashing(std::string_view function, ContainerSize size,
                         double now, std::optional<int> probe_start);

  // Same warm handling; cold starts fill the lowest-indexed worker first.
  Placement RoutePacking(std::string_view function, ContainerSize size,
                         double now);

  // Least allocated memory wins, vCPU load is ignored; only exact-size idle
  // containers on that worker are reused.
  Placement RouteMemoryCentric(std::string_view function, ContainerSize size,
                               double now);

  // Busy -> warm idle.
  void OnComplete(ContainerId id, double now);
  // Launching -> warm idle.
  void OnContainerReady(ContainerId id, double now);
  // Removes a busy container whose invocation was killed.
  void Destroy(ContainerId id);

  std::vector<Container> EvictIdle(double now);

  // Recomputes every worker's load from busy containers.
  bool Audit() const;

  const Container& container(ContainerId id) const;
  const std::vector<WorkerState>& workers() const { return workers_; }
  // For fault-injection tests.
  WorkerState& mutable_worker(int index) { return workers_.at(index); }
  const SchedulerConfig& config() const { return config_; }

  size_t num_containers() const { return containers_.size(); }
  size_t num_launching() const;
  uint64_t warm_larger_placements() const { return warm_larger_placements_; }
  uint64_t background_launches() const { return background_launches_; }
  uint64_t containers_created() const { return next_id_ - 1; }

 private:
  bool Rejects(ContainerSize size) const;
  std::optional<ContainerId> FindExact(std::string_view function,
                                       ContainerSize size,
                                       std::optional<int> on_worker) const;
  std::optional<ContainerId> FindLarger(std::string_view function,
                                        ContainerSize size) const;
  Placement PlaceWarm(ContainerId id, PlacementKind kind);
  Placement PlaceCold(std::string_view function, ContainerSize size,
                      int worker);
  Placement Queue();
  std::optional<int> ProbeFrom(int start, ContainerSize size) const;
  ContainerId Create(std::string_view function, ContainerSize size, int worker,
                     ContainerState state, double now);
  void Charge(int worker, ContainerSize size, int sign);
  Container& Mutable(ContainerId id);

  SchedulerConfig config_;
  Rng* rng_;
  std::vector<WorkerState> workers_;
  std::map<ContainerId, Container> containers_;
  std::map<std::string, std::set<ContainerId>, std::less<>> idle_by_function_;
  ContainerId next_id_ = 1;
  uint64_t warm_larger_placements_ = 0;
  uint64_t background_launches_ = 0;
};

}  // namespace rightsizer
