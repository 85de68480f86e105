#include "faasim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace faasim {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

template <typename T>
void get_to(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

void parse_scenario(const json& j, ScenarioConfig& sc) {
  reject_unknown(j,
                 {"num_workers", "cores", "worker_memory_mb", "num_classes",
                  "ramp_seconds", "lambda_max", "memory_mbps", "disk_mbps",
                  "network_mbps", "demand_s", "demand_model", "image_mb",
                  "runtime_mb", "code_mb", "beta_s", "message_kb", "seed"},
                 "scenario");
  get_to(j, "num_workers", sc.num_workers);
  get_to(j, "cores", sc.cores);
  get_to(j, "worker_memory_mb", sc.worker_memory_mb);
  get_to(j, "num_classes", sc.num_classes);
  get_to(j, "ramp_seconds", sc.ramp_seconds);
  get_to(j, "lambda_max", sc.lambda_max);
  get_to(j, "memory_mbps", sc.memory_mbps);
  get_to(j, "disk_mbps", sc.disk_mbps);
  get_to(j, "network_mbps", sc.network_mbps);
  get_to(j, "demand_s", sc.demand_s);
  get_to(j, "image_mb", sc.image_mb);
  get_to(j, "runtime_mb", sc.runtime_mb);
  get_to(j, "code_mb", sc.code_mb);
  get_to(j, "beta_s", sc.beta_s);
  get_to(j, "message_kb", sc.message_kb);
  get_to(j, "seed", sc.seed);
  if (j.contains("demand_model")) {
    std::string m = j.at("demand_model").get<std::string>();
    if (m == "deterministic") {
      sc.demand_model = DemandModel::Deterministic;
    } else if (m == "exponential") {
      sc.demand_model = DemandModel::Exponential;
    } else {
      throw ConfigError("demand_model must be deterministic or exponential");
    }
  }
}

void parse_scheduler(const json& j, SchedulerConfig& s) {
  reject_unknown(j,
                 {"name", "busy_alpha", "alpha_s", "alpha_per_class",
                  "epsilon", "tick_s", "oversubscription", "pool_factor",
                  "noah_alloc_cap", "noah_bootstrap", "window_s", "game_round_cap"},
                 "scheduler");
  get_to(j, "name", s.name);
  get_to(j, "busy_alpha", s.busy_alpha);
  get_to(j, "alpha_s", s.alpha_s);
  get_to(j, "alpha_per_class", s.alpha_per_class);
  get_to(j, "epsilon", s.epsilon);
  get_to(j, "tick_s", s.tick_s);
  get_to(j, "oversubscription", s.oversubscription);
  get_to(j, "pool_factor", s.pool_factor);
  get_to(j, "noah_alloc_cap", s.noah_alloc_cap);
  get_to(j, "noah_bootstrap", s.noah_bootstrap);
  get_to(j, "window_s", s.window_s);
  get_to(j, "game_round_cap", s.game_round_cap);
}

void parse_delays(const json& j, PlatformDelays& d) {
  reject_unknown(j,
                 {"container_create_work_s", "function_init_s",
                  "cold_cache_init_s", "resume_s", "warm_start_min_s",
                  "warm_start_max_s", "idle_timeout_s", "worker_setup_s"},
                 "delays");
  get_to(j, "container_create_work_s", d.container_create_work_s);
  get_to(j, "function_init_s", d.function_init_s);
  get_to(j, "cold_cache_init_s", d.cold_cache_init_s);
  get_to(j, "resume_s", d.resume_s);
  get_to(j, "warm_start_min_s", d.warm_start_min_s);
  get_to(j, "warm_start_max_s", d.warm_start_max_s);
  get_to(j, "idle_timeout_s", d.idle_timeout_s);
  get_to(j, "worker_setup_s", d.worker_setup_s);
  if (d.container_create_work_s < 0 || d.function_init_s < 0 ||
      d.cold_cache_init_s < 0 || d.resume_s < 0 || d.warm_start_min_s < 0 ||
      d.warm_start_max_s < d.warm_start_min_s || d.idle_timeout_s < 0 ||
      d.worker_setup_s < 0) {
    throw ConfigError("delays must be non-negative");
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig cfg;
  try {
    reject_unknown(j,
                   {"version", "scenario", "scheduler", "delays", "output_dir",
                    "workload_file", "replications"},
                   "config");
    if (!j.contains("version") || j.at("version").get<int>() != 1) {
      throw ConfigError("config must declare \"version\": 1");
    }
    if (j.contains("scenario")) parse_scenario(j.at("scenario"), cfg.scenario);
    if (j.contains("scheduler")) parse_scheduler(j.at("scheduler"), cfg.scheduler);
    if (j.contains("delays")) parse_delays(j.at("delays"), cfg.delays);
    get_to(j, "output_dir", cfg.output_dir);
    get_to(j, "workload_file", cfg.workload_file);
    get_to(j, "replications", cfg.replications);
    cfg.validate();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

std::string run_config_to_json(const RunConfig& cfg) {
  json j;
  j["version"] = 1;
  j["scenario"] = {
      {"num_workers", cfg.scenario.num_workers},
      {"cores", cfg.scenario.cores},
      {"worker_memory_mb", cfg.scenario.worker_memory_mb},
      {"num_classes", cfg.scenario.num_classes},
      {"ramp_seconds", cfg.scenario.ramp_seconds},
      {"lambda_max", cfg.scenario.lambda_max},
      {"memory_mbps", cfg.scenario.memory_mbps},
      {"disk_mbps", cfg.scenario.disk_mbps},
      {"network_mbps", cfg.scenario.network_mbps},
      {"demand_s", cfg.scenario.demand_s},
      {"demand_model", cfg.scenario.demand_model == DemandModel::Deterministic
                           ? "deterministic"
                           : "exponential"},
      {"image_mb", cfg.scenario.image_mb},
      {"runtime_mb", cfg.scenario.runtime_mb},
      {"code_mb", cfg.scenario.code_mb},
      {"beta_s", cfg.scenario.beta_s},
      {"message_kb", cfg.scenario.message_kb},
      {"seed", cfg.scenario.seed},
  };
  j["scheduler"] = {
      {"name", cfg.scheduler.name},
      {"busy_alpha", cfg.scheduler.busy_alpha},
      {"alpha_s", cfg.scheduler.alpha_s},
      {"epsilon", cfg.scheduler.epsilon},
      {"tick_s", cfg.scheduler.tick_s},
      {"oversubscription", cfg.scheduler.oversubscription},
      {"pool_factor", cfg.scheduler.pool_factor},
      {"noah_alloc_cap", cfg.scheduler.noah_alloc_cap},
      {"noah_bootstrap", cfg.scheduler.noah_bootstrap},
      {"window_s", cfg.scheduler.window_s},
      {"game_round_cap", cfg.scheduler.game_round_cap},
  };
  if (!cfg.scheduler.alpha_per_class.empty()) {
    j["scheduler"]["alpha_per_class"] = cfg.scheduler.alpha_per_class;
  }
  j["delays"] = {
      {"container_create_work_s", cfg.delays.container_create_work_s},
      {"function_init_s", cfg.delays.function_init_s},
      {"cold_cache_init_s", cfg.delays.cold_cache_init_s},
      {"resume_s", cfg.delays.resume_s},
      {"warm_start_min_s", cfg.delays.warm_start_min_s},
      {"warm_start_max_s", cfg.delays.warm_start_max_s},
      {"idle_timeout_s", cfg.delays.idle_timeout_s},
      {"worker_setup_s", cfg.delays.worker_setup_s},
  };
  j["output_dir"] = cfg.output_dir;
  if (!cfg.workload_file.empty()) j["workload_file"] = cfg.workload_file;
  j["replications"] = cfg.replications;
  return j.dump(2);
}

}  // namespace faasim
