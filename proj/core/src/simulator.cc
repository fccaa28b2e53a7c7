#include "rightsizer/simulator.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <set>

#include "rightsizer/error.h"
#include "rightsizer/featurizer.h"
#include "rightsizer/perf_model.h"

namespace rightsizer {
namespace {

enum class EventKind {
  kArrival,
  kDispatch,        // features are ready; allocate and route
  kExecStart,       // a cold container finished starting
  kContainerReady,  // a background launch finished starting
  kFinish,          // completion or OOM kill, whichever the progress hits
  kTimeout,
  kEvictSweep,
};

struct Event {
  double time = 0.0;
  uint64_t seq = 0;
  EventKind kind = EventKind::kArrival;
  uint64_t subject = 0;
  uint64_t version = 0;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

struct Invocation {
  uint64_t id = 0;
  const CatalogFunction* fn = nullptr;
  const InputDescriptor* input = nullptr;
  const FeatureVector* features = nullptr;
  double slo_s = 0.0;
  ResultRow row;
  Allocation alloc;
  ContainerId container = 0;
  ContainerSize size;
  double dispatched_at = 0.0;
  int probe_start = -1;
  // Execution state, in nominal (uncontended) seconds of progress.
  bool running = false;
  bool finished = false;
  double exec_start = 0.0;
  double nominal_s = 0.0;
  double done = 0.0;
  double rate = 1.0;
  double last_update = 0.0;
  double width = 1.0;
  std::optional<double> kill_fraction;
  uint64_t version = 0;
};

struct WorkerLoad {
  std::set<uint64_t> running;
  double demand = 0.0;
  double factor = 1.0;
};

}  // namespace

class Simulator::Engine {
 public:
  Engine(SimConfig config, const Catalog& catalog, const SloTable& slos)
      : config_(config),
        catalog_(catalog),
        slos_(slos),
        rng_(config.seed),
        allocator_(config.allocator),
        scheduler_(config.scheduler, &rng_),
        loads_(static_cast<size_t>(config.scheduler.num_workers)) {
    if (!(config_.worker_cores > 0.0)) throw InputError("worker_cores must be > 0");
    if (!(config_.evict_sweep_s > 0.0)) throw InputError("evict_sweep_s must be > 0");
    for (const auto& fn : catalog_.functions()) {
      allocator_.RegisterFunction(fn.profile.name,
                                  SchemaFor(fn.profile.input_type).dim());
      for (const auto& in : fn.inputs) {
        features_.emplace(std::make_pair(fn.profile.name, in.input_id), Featurize(in));
      }
    }
  }

  ResultsTable Run(const Schedule& schedule) {
    if (ran_) throw SimulationError("Simulator::Run called twice");
    ran_ = true;
    invocations_.reserve(schedule.arrivals.size());
    for (const Arrival& a : schedule.arrivals) {
      if (!(a.t_s >= 0.0) || !std::isfinite(a.t_s)) {
        throw InputError("malformed schedule: bad arrival time");
      }
      Invocation inv;
      inv.id = invocations_.size();
      inv.fn = &catalog_.Get(a.function);
      inv.input = &catalog_.GetInput(a.function, a.input_id);
      inv.features = &features_.at({a.function, a.input_id});
      inv.slo_s = slos_.Get(a.function, a.input_id);
      inv.row.invocation = inv.id;
      inv.row.arrival_s = a.t_s;
      inv.row.function = a.function;
      inv.row.input_id = a.input_id;
      inv.row.slo_s = inv.slo_s;
      invocations_.push_back(std::move(inv));
      Push(a.t_s, EventKind::kArrival, invocations_.size() - 1);
    }
    if (!invocations_.empty()) Push(config_.evict_sweep_s, EventKind::kEvictSweep, 0);

    while (!events_.empty()) {
      Event ev = events_.top();
      events_.pop();
      if (ev.time < clock_) ++stats_.clock_regressions;
      clock_ = std::max(clock_, ev.time);
      ++stats_.events;
      Handle(ev);
      CheckInvariants();
    }

    stats_.warm_larger_placements = scheduler_.warm_larger_placements();
    stats_.background_launches = scheduler_.background_launches();
    stats_.containers_created = scheduler_.containers_created();

    ResultsTable table;
    table.rows.reserve(invocations_.size());
    for (auto& inv : invocations_) {
      if (!inv.finished) {
        throw SimulationError("invocation " + std::to_string(inv.id) +
                              " never finished");
      }
      table.rows.push_back(std::move(inv.row));
    }
    return table;
  }

  const RunStats& stats() const { return stats_; }
  const Allocator& allocator() const { return allocator_; }
  const Scheduler& scheduler() const { return scheduler_; }

 private:
  void Push(double time, EventKind kind, uint64_t subject, uint64_t version = 0) {
    events_.push(Event{time, next_seq_++, kind, subject, version});
  }

  void Handle(const Event& ev) {
    switch (ev.kind) {
      case EventKind::kArrival:
        OnArrival(invocations_[ev.subject]);
        break;
      case EventKind::kDispatch:
        OnDispatch(invocations_[ev.subject]);
        break;
      case EventKind::kExecStart:
        StartExec(invocations_[ev.subject]);
        break;
      case EventKind::kContainerReady:
        scheduler_.OnContainerReady(ev.subject, clock_);
        break;
      case EventKind::kFinish: {
        Invocation& inv = invocations_[ev.subject];
        if (inv.running && inv.version == ev.version) OnFinish(inv);
        break;
      }
      case EventKind::kTimeout: {
        Invocation& inv = invocations_[ev.subject];
        if (inv.running) OnTimeout(inv);
        break;
      }
      case EventKind::kEvictSweep:
        scheduler_.EvictIdle(clock_);
        // Keep sweeping only while something else is still pending.
        if (!events_.empty()) {
          Push(clock_ + config_.evict_sweep_s, EventKind::kEvictSweep, 0);
        }
        break;
    }
  }

  void OnArrival(Invocation& inv) {
    inv.row.featurize_ms = ExtractionLatencyMs(*inv.input, inv.fn->profile.trigger);
    Push(clock_ + inv.row.featurize_ms / 1000.0, EventKind::kDispatch, inv.id);
  }

  void OnDispatch(Invocation& inv) {
    inv.alloc = allocator_.Allocate(inv.fn->profile.name, *inv.features,
                                    inv.slo_s, inv.input->size_bytes);
    inv.row.alloc_vcpus = inv.alloc.vcpus;
    inv.row.alloc_mem_mb = inv.alloc.memory_mb;
    inv.row.vcpu_from_model = inv.alloc.vcpu_from_model;
    inv.row.mem_from_model = inv.alloc.mem_from_model;
    inv.dispatched_at = clock_;
    // Strict FIFO: nothing overtakes invocations already waiting.
    if (!waiting_.empty() || !TryPlace(inv)) {
      ++stats_.queued_invocations;
      waiting_.push_back(inv.id);
    }
  }

  // Returns false if the invocation had to wait.
  bool TryPlace(Invocation& inv) {
    std::optional<int> probe;
    if (inv.probe_start >= 0) probe = inv.probe_start;
    Placement p = scheduler_.Route(inv.fn->profile.name,
                                   {inv.alloc.vcpus, inv.alloc.memory_mb}, clock_,
                                   probe);
    switch (p.kind) {
      case PlacementKind::kRejected:
        inv.row.placement = PlacementKind::kRejected;
        inv.row.e2e_s = clock_ - inv.row.arrival_s;
        inv.finished = true;
        return true;
      case PlacementKind::kQueued:
        inv.probe_start = p.worker;
        return false;
      default:
        break;
    }
    const Container& c = scheduler_.container(p.container);
    inv.container = c.id;
    inv.size = c.size;
    inv.row.placement = p.kind;
    inv.row.worker = c.worker;
    inv.row.container_vcpus = c.size.vcpus;
    inv.row.container_mem_mb = c.size.memory_mb;
    inv.row.queue_s = clock_ - inv.dispatched_at;
    const double cold_s = inv.fn->profile.cold_start_ms / 1000.0;
    if (p.background_launch) {
      Push(clock_ + cold_s, EventKind::kContainerReady, p.background_launch->container);
    }
    if (p.kind == PlacementKind::kCold) {
      inv.row.cold_start_s = cold_s;
      Push(clock_ + cold_s, EventKind::kExecStart, inv.id);
    } else {
      StartExec(inv);
    }
    return true;
  }

  void DrainQueue() {
    while (!waiting_.empty()) {
      Invocation& head = invocations_[waiting_.front()];
      if (!TryPlace(head)) return;
      waiting_.pop_front();
    }
  }

  void StartExec(Invocation& inv) {
    const FunctionProfile& profile = inv.fn->profile;
    inv.running = true;
    inv.exec_start = clock_;
    inv.last_update = clock_;
    inv.nominal_s = ExecTime(profile, *inv.input, inv.size.vcpus, 1.0);
    inv.width = ParallelWidth(profile, inv.size.vcpus);
    inv.kill_fraction =
        Footprint(profile, *inv.input).KillFraction(inv.size.memory_mb);
    WorkerLoad& load = loads_[static_cast<size_t>(inv.row.worker)];
    load.running.insert(inv.id);
    load.demand += inv.width;
    Push(clock_ + profile.timeout_s, EventKind::kTimeout, inv.id);
    Rebalance(inv.row.worker, &inv);
  }

  // Re-integrates progress on a worker after its demand changed and
  // reschedules finish events at the new rate. `fresh` is always
  // (re)scheduled even if the factor did not move.
  void Rebalance(int worker, Invocation* fresh) {
    WorkerLoad& load = loads_[static_cast<size_t>(worker)];
    if (load.running.empty()) load.demand = 0.0;  // drop rounding residue
    const double factor = ContentionFactor(load.demand, config_.worker_cores);
    stats_.max_contention = std::max(stats_.max_contention, factor);
    const bool changed = factor != load.factor;
    load.factor = factor;
    for (uint64_t id : load.running) {
      Invocation& inv = invocations_[id];
      if (!changed && &inv != fresh) continue;
      inv.done += (clock_ - inv.last_update) * inv.rate;
      inv.last_update = clock_;
      inv.rate = 1.0 / factor;
      ++inv.version;
      const double goal =
          inv.kill_fraction ? *inv.kill_fraction * inv.nominal_s : inv.nominal_s;
      const double remaining = std::max(0.0, goal - inv.done);
      Push(clock_ + remaining / inv.rate, EventKind::kFinish, inv.id, inv.version);
    }
  }

  void StopRunning(Invocation& inv) {
    inv.done += (clock_ - inv.last_update) * inv.rate;
    inv.last_update = clock_;
    inv.running = false;
    inv.finished = true;
    WorkerLoad& load = loads_[static_cast<size_t>(inv.row.worker)];
    load.running.erase(inv.id);
    load.demand -= inv.width;
    inv.row.exec_s = clock_ - inv.exec_start;
    inv.row.e2e_s = clock_ - inv.row.arrival_s;
  }

  void OnFinish(Invocation& inv) {
    const FunctionProfile& profile = inv.fn->profile;
    const bool killed = inv.kill_fraction.has_value();
    StopRunning(inv);
    inv.row.max_vcpus_used = MaxVcpusUsed(profile, inv.size.vcpus);
    if (killed) {
      inv.row.oom_killed = true;
      inv.row.peak_mem_mb = inv.size.memory_mb;
      scheduler_.Destroy(inv.container);
    } else {
      const double error = std::abs(inv.done - inv.nominal_s) / inv.nominal_s;
      stats_.max_work_error = std::max(stats_.max_work_error, error);
      inv.row.peak_mem_mb = Footprint(profile, *inv.input).peak_mb;
      inv.row.slo_met = inv.row.e2e_s <= inv.slo_s;
      scheduler_.OnComplete(inv.container, clock_);
    }
    InvocationOutcome o;
    o.function = profile.name;
    o.features = *inv.features;
    o.slo_s = inv.slo_s;
    o.alloc = Allocation{inv.size.vcpus, inv.size.memory_mb,
                         inv.alloc.vcpu_from_model, inv.alloc.mem_from_model};
    o.exec_s = inv.row.exec_s;
    o.e2e_s = inv.row.e2e_s;
    o.max_vcpus_used = inv.row.max_vcpus_used;
    o.peak_mem_mb = inv.row.peak_mem_mb;
    o.oom_killed = killed;
    allocator_.Feedback(o);
    if (!killed) ++stats_.vcpu_feedbacks;
    ++stats_.mem_feedbacks;
    Rebalance(inv.row.worker, nullptr);
    DrainQueue();
  }

  void OnTimeout(Invocation& inv) {
    StopRunning(inv);
    inv.row.timeout = true;
    inv.row.max_vcpus_used = MaxVcpusUsed(inv.fn->profile, inv.size.vcpus);
    scheduler_.Destroy(inv.container);
    Rebalance(inv.row.worker, nullptr);
    DrainQueue();
  }

  void CheckInvariants() {
    for (const WorkerState& w : scheduler_.workers()) {
      stats_.max_active_vcpus = std::max(stats_.max_active_vcpus, w.active_vcpus);
      if (w.active_vcpus > w.vcpu_capacity ||
          w.active_memory_mb > w.memory_capacity_mb) {
        ++stats_.capacity_violations;
      }
    }
    if (config_.audit_every_event && !scheduler_.Audit()) ++stats_.audit_failures;
  }

  SimConfig config_;
  const Catalog& catalog_;
  const SloTable& slos_;
  Rng rng_;
  Allocator allocator_;
  Scheduler scheduler_;
  std::vector<WorkerLoad> loads_;
  std::map<std::pair<std::string, std::string>, FeatureVector> features_;
  std::vector<Invocation> invocations_;
  std::priority_queue<Event, std::vector<Event>, Later> events_;
  std::deque<uint64_t> waiting_;
  RunStats stats_;
  double clock_ = 0.0;
  uint64_t next_seq_ = 0;
  bool ran_ = false;
};

Simulator::Simulator(SimConfig config, const Catalog& catalog,
                     const SloTable& slos)
    : engine_(std::make_unique<Engine>(config, catalog, slos)) {}

Simulator::~Simulator() = default;

ResultsTable Simulator::Run(const Schedule& schedule) {
  return engine_->Run(schedule);
}

const RunStats& Simulator::stats() const { return engine_->stats(); }
const Allocator& Simulator::allocator() const { return engine_->allocator(); }
const Scheduler& Simulator::scheduler() const { return engine_->scheduler(); }

}  // namespace rightsizer
