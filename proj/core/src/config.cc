#include "rightsizer/config.h"

#include <fstream>

#include "rightsizer/csv.h"
#include "rightsizer/error.h"

namespace rightsizer {
namespace {

int AsInt(std::string_view v, std::string_view key) {
  return static_cast<int>(ParseInt(v, key));
}

std::filesystem::path AsPath(std::string_view v,
                             const std::filesystem::path& base_dir) {
  std::filesystem::path p{std::string(v)};
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p;
}

}  // namespace

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys{
      "num_workers",       "user_cpu",         "worker_memory_mb",
      "worker_cores",      "keepalive_s",      "evict_sweep_s",
      "scheduler_policy",  "allocation_policy", "cost_mode",
      "vcpu_conf_threshold", "mem_conf_threshold", "default_vcpus",
      "default_mem_mb",    "x_s",              "y_s",
      "vcpu_alpha_over",   "vcpu_alpha_under", "mem_alpha_over",
      "mem_alpha_under",   "c_max",            "mem_max_mb",
      "learning_rate",     "slo_multiplier",   "target_rps",
      "window_minutes",    "seed",             "audit",
      "trace",             "catalog",          "schedule",
      "out"};
  return keys;
}

void SetConfigValue(RunConfig& c, std::string_view key, std::string_view value,
                    const std::filesystem::path& base_dir) {
  value = Trim(value);
  AllocatorConfig& a = c.sim.allocator;
  SchedulerConfig& s = c.sim.scheduler;
  if (key == "num_workers") {
    s.num_workers = AsInt(value, key);
  } else if (key == "user_cpu") {
    s.user_cpu = AsInt(value, key);
  } else if (key == "worker_memory_mb") {
    s.worker_memory_mb = AsInt(value, key);
  } else if (key == "worker_cores") {
    c.sim.worker_cores = ParseDouble(value, key);
  } else if (key == "keepalive_s") {
    s.keepalive_s = ParseDouble(value, key);
  } else if (key == "evict_sweep_s") {
    c.sim.evict_sweep_s = ParseDouble(value, key);
  } else if (key == "scheduler_policy") {
    auto p = ParseSchedulerPolicy(value);
    if (!p) throw InputError("unknown scheduler_policy '" + std::string(value) + "'");
    s.policy = *p;
  } else if (key == "allocation_policy") {
    if (value == "learned") {
      a.policy = AllocationPolicy::kLearned;
    } else if (value == "static_medium") {
      a.policy = AllocationPolicy::kStaticMedium;
    } else if (value == "static_large") {
      a.policy = AllocationPolicy::kStaticLarge;
    } else {
      throw InputError("unknown allocation_policy '" + std::string(value) + "'");
    }
  } else if (key == "cost_mode") {
    if (value == "absolute") {
      a.cost_mode = CostMode::kAbsolute;
    } else if (value == "proportional") {
      a.cost_mode = CostMode::kProportional;
    } else {
      throw InputError("unknown cost_mode '" + std::string(value) + "'");
    }
  } else if (key == "vcpu_conf_threshold") {
    a.vcpu_conf_threshold = AsInt(value, key);
  } else if (key == "mem_conf_threshold") {
    a.mem_conf_threshold = AsInt(value, key);
  } else if (key == "default_vcpus") {
    a.default_vcpus = AsInt(value, key);
  } else if (key == "default_mem_mb") {
    a.default_mem_mb = AsInt(value, key);
  } else if (key == "x_s") {
    a.x_s = ParseDouble(value, key);
  } else if (key == "y_s") {
    a.y_s = ParseDouble(value, key);
  } else if (key == "vcpu_alpha_over") {
    a.vcpu_alpha_over = ParseDouble(value, key);
  } else if (key == "vcpu_alpha_under") {
    a.vcpu_alpha_under = ParseDouble(value, key);
  } else if (key == "mem_alpha_over") {
    a.mem_alpha_over = ParseDouble(value, key);
  } else if (key == "mem_alpha_under") {
    a.mem_alpha_under = ParseDouble(value, key);
  } else if (key == "c_max") {
    a.c_max = AsInt(value, key);
  } else if (key == "mem_max_mb") {
    a.mem_max_mb = AsInt(value, key);
  } else if (key == "learning_rate") {
    a.learning_rate = ParseDouble(value, key);
  } else if (key == "slo_multiplier") {
    c.slo_multiplier = ParseDouble(value, key);
  } else if (key == "target_rps") {
    c.target_rps = ParseDouble(value, key);
  } else if (key == "window_minutes") {
    c.window_minutes = AsInt(value, key);
  } else if (key == "seed") {
    int64_t seed = ParseInt(value, key);
    if (seed < 0) throw InputError("seed must be non-negative");
    c.sim.seed = static_cast<uint64_t>(seed);
  } else if (key == "audit") {
    c.sim.audit_every_event = ParseBool(value, key);
  } else if (key == "trace") {
    c.trace_path = AsPath(value, base_dir);
  } else if (key == "catalog") {
    c.catalog_path = AsPath(value, base_dir);
  } else if (key == "schedule") {
    c.schedule_path = value.empty() ? std::filesystem::path{} : AsPath(value, base_dir);
  } else if (key == "out") {
    c.output_dir = AsPath(value, base_dir);
  } else {
    throw InputError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig ParseRunConfig(std::istream& in, const std::filesystem::path& base_dir,
                         std::string_view source) {
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string_view text = Trim(line);
    if (text.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    auto eq = text.find('=');
    if (eq == std::string_view::npos) throw InputError(where + ": expected key = value");
    try {
      SetConfigValue(config, Trim(text.substr(0, eq)), text.substr(eq + 1), base_dir);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  ValidateRunConfig(config);
  return config;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  return ParseRunConfig(in, path.parent_path(), path.string());
}

void ValidateRunConfig(const RunConfig& c) {
  ValidateAllocatorConfig(c.sim.allocator);
  const SchedulerConfig& s = c.sim.scheduler;
  if (s.num_workers < 1) throw InputError("num_workers must be >= 1");
  if (s.user_cpu < 1) throw InputError("user_cpu must be >= 1");
  if (s.worker_memory_mb < 128) throw InputError("worker_memory_mb must be >= 128");
  if (!(s.keepalive_s >= 0.0)) throw InputError("keepalive_s must be >= 0");
  if (!(c.sim.worker_cores > 0.0)) throw InputError("worker_cores must be > 0");
  if (!(c.sim.evict_sweep_s > 0.0)) throw InputError("evict_sweep_s must be > 0");
  if (!(c.slo_multiplier > 0.0)) throw InputError("slo_multiplier must be > 0");
  if (!(c.target_rps > 0.0)) throw InputError("target_rps must be > 0");
  if (c.window_minutes < 1 || c.window_minutes > 1440) {
    throw InputError("window_minutes must be in [1, 1440]");
  }
}

std::vector<std::pair<std::string, std::string>> DescribeRunConfig(
    const RunConfig& c) {
  const AllocatorConfig& a = c.sim.allocator;
  const SchedulerConfig& s = c.sim.scheduler;
  return {
      {"num_workers", std::to_string(s.num_workers)},
      {"user_cpu", std::to_string(s.user_cpu)},
      {"worker_memory_mb", std::to_string(s.worker_memory_mb)},
      {"worker_cores", FormatDouble(c.sim.worker_cores)},
      {"keepalive_s", FormatDouble(s.keepalive_s)},
      {"evict_sweep_s", FormatDouble(c.sim.evict_sweep_s)},
      {"scheduler_policy", std::string(ToString(s.policy))},
      {"allocation_policy", std::string(ToString(a.policy))},
      {"cost_mode", std::string(ToString(a.cost_mode))},
      {"vcpu_conf_threshold", std::to_string(a.vcpu_conf_threshold)},
      {"mem_conf_threshold", std::to_string(a.mem_conf_threshold)},
      {"default_vcpus", std::to_string(a.default_vcpus)},
      {"default_mem_mb", std::to_string(a.default_mem_mb)},
      {"x_s", FormatDouble(a.x_s)},
      {"y_s", FormatDouble(a.y_s)},
      {"vcpu_alpha_over", FormatDouble(a.vcpu_alpha_over)},
      {"vcpu_alpha_under", FormatDouble(a.vcpu_alpha_under)},
      {"mem_alpha_over", FormatDouble(a.mem_alpha_over)},
      {"mem_alpha_under", FormatDouble(a.mem_alpha_under)},
      {"c_max", std::to_string(a.c_max)},
      {"mem_max_mb", std::to_string(a.mem_max_mb)},
      {"learning_rate", FormatDouble(a.learning_rate)},
      {"slo_multiplier", FormatDouble(c.slo_multiplier)},
      {"target_rps", FormatDouble(c.target_rps)},
      {"window_minutes", std::to_string(c.window_minutes)},
      {"seed", std::to_string(c.sim.seed)},
  };
}

}  // namespace rightsizer
