#include "rightsizer/scheduler.h"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <utility>

#include "rightsizer/error.h"

namespace rightsizer {
namespace {

constexpr std::array<std::pair<SchedulerPolicy, std::string_view>, 3>
    kPolicyNames{{
        {SchedulerPolicy::kHashing, "hashing"},
        {SchedulerPolicy::kPacking, "packing"},
        {SchedulerPolicy::kMemoryCentric, "memory_centric_baseline"},
    }};

}  // namespace

std::string_view ToString(SchedulerPolicy policy) {
  for (const auto& [p, name] : kPolicyNames) {
    if (p == policy) return name;
  }
  return "unknown";
}

std::optional<SchedulerPolicy> ParseSchedulerPolicy(std::string_view name) {
  for (const auto& [p, n] : kPolicyNames) {
    if (n == name) return p;
  }
  return std::nullopt;
}

std::string_view ToString(PlacementKind kind) {
  switch (kind) {
    case PlacementKind::kWarmExact:
      return "warm_exact";
    case PlacementKind::kWarmLarger:
      return "warm_larger";
    case PlacementKind::kCold:
      return "cold";
    case PlacementKind::kQueued:
      return "queued";
    case PlacementKind::kRejected:
      return "rejected";
  }
  return "unknown";
}

int HomeServer(std::string_view function, int num_workers) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : function) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return static_cast<int>(h % static_cast<uint64_t>(std::max(num_workers, 1)));
}

Scheduler::Scheduler(SchedulerConfig config, Rng* rng)
    : config_(config), rng_(rng) {
  if (config_.num_workers < 1) throw InputError("num_workers must be >= 1");
  if (config_.user_cpu < 1) throw InputError("user_cpu must be >= 1");
  if (config_.worker_memory_mb < 128) {
    throw InputError("worker_memory_mb must be >= 128");
  }
  if (!(config_.keepalive_s >= 0.0)) throw InputError("keepalive_s must be >= 0");
  workers_.resize(static_cast<size_t>(config_.num_workers));
  for (int i = 0; i < config_.num_workers; ++i) {
    workers_[i].id = i;
    workers_[i].vcpu_capacity = config_.user_cpu;
    workers_[i].memory_capacity_mb = config_.worker_memory_mb;
  }
}

Placement Scheduler::Route(std::string_view function, ContainerSize size,
                           double now, std::optional<int> probe_start) {
  switch (config_.policy) {
    case SchedulerPolicy::kHashing:
      return RouteHashing(function, size, now, probe_start);
    case SchedulerPolicy::kPacking:
      return RoutePacking(function, size, now);
    case SchedulerPolicy::kMemoryCentric:
      return RouteMemoryCentric(function, size, now);
  }
  throw SimulationError("unknown scheduler policy");
}

bool Scheduler::Rejects(ContainerSize size) const {
  return size.vcpus > config_.user_cpu || size.memory_mb > config_.worker_memory_mb ||
         size.vcpus < 1 || size.memory_mb < 1;
}

std::optional<ContainerId> Scheduler::FindExact(
    std::string_view function, ContainerSize size,
    std::optional<int> on_worker) const {
  auto it = idle_by_function_.find(function);
  if (it == idle_by_function_.end()) return std::nullopt;
  for (ContainerId id : it->second) {
    const Container& c = containers_.at(id);
    if (c.size != size) continue;
    if (on_worker && c.worker != *on_worker) continue;
    if (workers_[c.worker].Fits(c.size)) return id;
  }
  return std::nullopt;
}

std::optional<ContainerId> Scheduler::FindLarger(std::string_view function,
                                                 ContainerSize size) const {
  auto it = idle_by_function_.find(function);
  if (it == idle_by_function_.end()) return std::nullopt;
  std::optional<ContainerId> best;
  std::pair<int, int> best_surplus{0, 0};
  for (ContainerId id : it->second) {
    const Container& c = containers_.at(id);
    if (c.size.vcpus < size.vcpus || c.size.memory_mb < size.memory_mb) continue;
    if (c.size == size) continue;
    if (!workers_[c.worker].Fits(c.size)) continue;
    std::pair<int, int> surplus{c.size.vcpus - size.vcpus,
                                c.size.memory_mb - size.memory_mb};
    if (!best || surplus < best_surplus) {
      best = id;
      best_surplus = surplus;
    }
  }
  return best;
}

Placement Scheduler::PlaceWarm(ContainerId id, PlacementKind kind) {
  Container& c = Mutable(id);
  idle_by_function_[c.function].erase(id);
  c.state = ContainerState::kBusy;
  Charge(c.worker, c.size, +1);
  return Placement{kind, id, c.worker, std::nullopt};
}

Placement Scheduler::PlaceCold(std::string_view function, ContainerSize size,
                               int worker) {
  // Cold containers are created busy so their capacity is reserved while the
  // container starts.
  ContainerId id = Create(function, size, worker, ContainerState::kBusy, 0.0);
  Charge(worker, size, +1);
  return Placement{PlacementKind::kCold, id, worker, std::nullopt};
}

Placement Scheduler::Queue() {
  int worker = static_cast<int>(rng_->UniformInt(0, config_.num_workers - 1));
  return Placement{PlacementKind::kQueued, 0, worker, std::nullopt};
}

std::optional<int> Scheduler::ProbeFrom(int start, ContainerSize size) const {
  const int n = config_.num_workers;
  for (int step = 0; step < n; ++step) {
    int w = (start + step) % n;
    if (workers_[w].Fits(size)) return w;
  }
  return std::nullopt;
}

Placement Scheduler::RouteHashing(std::string_view function, ContainerSize size,
                                  double now, std::optional<int> probe_start) {
  if (Rejects(size)) return Placement{};
  if (auto id = FindExact(function, size, std::nullopt)) {
    return PlaceWarm(*id, PlacementKind::kWarmExact);
  }
  const int home = HomeServer(function, config_.num_workers);
  if (auto id = FindLarger(function, size)) {
    Placement p = PlaceWarm(*id, PlacementKind::kWarmLarger);
    ++warm_larger_placements_;
    int target = workers_[p.worker].Fits(size) ? p.worker : home;
    ContainerId bg =
        Create(function, size, target, ContainerState::kLaunching, now);
    ++background_launches_;
    p.background_launch = BackgroundLaunch{size, target, bg};
    return p;
  }
  int start = probe_start.value_or(home) % config_.num_workers;
  if (auto w = ProbeFrom(start, size)) return PlaceCold(function, size, *w);
  return Queue();
}

Placement Scheduler::RoutePacking(std::string_view function, ContainerSize size,
                                  double now) {
  if (Rejects(size)) return Placement{};
  if (auto id = FindExact(function, size, std::nullopt)) {
    return PlaceWarm(*id, PlacementKind::kWarmExact);
  }
  if (auto id = FindLarger(function, size)) {
    Placement p = PlaceWarm(*id, PlacementKind::kWarmLarger);
    ++warm_larger_placements_;
    int target = workers_[p.worker].Fits(size)
                     ? p.worker
                     : ProbeFrom(0, size).value_or(p.worker);
    ContainerId bg =
        Create(function, size, target, ContainerState::kLaunching, now);
    ++background_launches_;
    p.background_launch = BackgroundLaunch{size, target, bg};
    return p;
  }
  if (auto w = ProbeFrom(0, size)) return PlaceCold(function, size, *w);
  return Queue();
}

Placement Scheduler::RouteMemoryCentric(std::string_view function,
                                        ContainerSize size, double) {
  if (Rejects(size)) return Placement{};
  std::optional<int> chosen;
  for (const WorkerState& w : workers_) {
    if (!w.Fits(size)) continue;
    if (!chosen || w.active_memory_mb < workers_[*chosen].active_memory_mb) {
      chosen = w.id;
    }
  }
  if (!chosen) return Queue();
  if (auto id = FindExact(function, size, chosen)) {
    return PlaceWarm(*id, PlacementKind::kWarmExact);
  }
  return PlaceCold(function, size, *chosen);
}

ContainerId Scheduler::Create(std::string_view function, ContainerSize size,
                              int worker, ContainerState state, double now) {
  ContainerId id = next_id_++;
  containers_.emplace(
      id, Container{id, std::string(function), size, worker, state, now});
  return id;
}

void Scheduler::Charge(int worker, ContainerSize size, int sign) {
  WorkerState& w = workers_[worker];
  w.active_vcpus += sign * size.vcpus;
  w.active_memory_mb += sign * size.memory_mb;
}

Container& Scheduler::Mutable(ContainerId id) {
  auto it = containers_.find(id);
  if (it == containers_.end()) {
    throw SimulationError("unknown container " + std::to_string(id));
  }
  return it->second;
}

const Container& Scheduler::container(ContainerId id) const {
  auto it = containers_.find(id);
  if (it == containers_.end()) {
    throw SimulationError("unknown container " + std::to_string(id));
  }
  return it->second;
}

void Scheduler::OnComplete(ContainerId id, double now) {
  Container& c = Mutable(id);
  if (c.state != ContainerState::kBusy) {
    throw SimulationError("container " + std::to_string(id) +
                          " completed while not busy");
  }
  c.state = ContainerState::kWarmIdle;
  c.idle_since = now;
  Charge(c.worker, c.size, -1);
  idle_by_function_[c.function].insert(id);
}

void Scheduler::OnContainerReady(ContainerId id, double now) {
  Container& c = Mutable(id);
  if (c.state != ContainerState::kLaunching) {
    throw SimulationError("container " + std::to_string(id) +
                          " became ready while not launching");
  }
  c.state = ContainerState::kWarmIdle;
  c.idle_since = now;
  idle_by_function_[c.function].insert(id);
}

void Scheduler::Destroy(ContainerId id) {
  Container& c = Mutable(id);
  if (c.state != ContainerState::kBusy) {
    throw SimulationError("only busy containers can be destroyed");
  }
  Charge(c.worker, c.size, -1);
  containers_.erase(id);
}

std::vector<Container> Scheduler::EvictIdle(double now) {
  std::vector<Container> evicted;
  for (auto it = containers_.begin(); it != containers_.end();) {
    const Container& c = it->second;
    if (c.state == ContainerState::kWarmIdle &&
        now - c.idle_since >= config_.keepalive_s) {
      idle_by_function_[c.function].erase(c.id);
      evicted.push_back(c);
      it = containers_.erase(it);
    } else {
      ++it;
    }
  }
  return evicted;
}

bool Scheduler::Audit() const {
  std::vector<std::pair<int, int>> load(workers_.size(), {0, 0});
  for (const auto& [id, c] : containers_) {
    if (c.state != ContainerState::kBusy) continue;
    load[c.worker].first += c.size.vcpus;
    load[c.worker].second += c.size.memory_mb;
  }
  for (size_t i = 0; i < workers_.size(); ++i) {
    const WorkerState& w = workers_[i];
    if (w.active_vcpus != load[i].first || w.active_memory_mb != load[i].second) {
      return false;
    }
    if (w.active_vcpus > w.vcpu_capacity ||
        w.active_memory_mb > w.memory_capacity_mb) {
      return false;
    }
  }
  return true;
}

size_t Scheduler::num_launching() const {
  return static_cast<size_t>(std::count_if(
      containers_.begin(), containers_.end(), [](const auto& kv) {
        return kv.second.state == ContainerState::kLaunching;
      }));
}

}  // namespace rightsizer
