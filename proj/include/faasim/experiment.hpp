#pragma once

#include <memory>
#include <string>
#include <vector>

#include "faasim/controllers.hpp"
#include "faasim/metrics.hpp"
#include "faasim/platform_types.hpp"
#include "faasim/workload.hpp"

namespace faasim {

struct SchedulerConfig {
  std::string name = "noah";  // openwhisk|first-fit|next-fit|best-fit|noncoop|noah
  int busy_alpha = 16;
  double alpha_s = 1e-4;               // NOAH waiting-time threshold
  std::vector<double> alpha_per_class; // optional per-class override
  double epsilon = 1e-4;               // noncoop convergence threshold
  double tick_s = 0.1;                 // rebalance cadence (noncoop and noah)
  int oversubscription = 2;            // invoker concurrency factor (OW family)
  int pool_factor = 2;                 // instance pool limit factor
  int noah_alloc_cap = 0;              // virtual allocations per worker; 0 = cores
  int noah_bootstrap = 12;             // allocations for a class without samples
  double window_s = 10.0;              // rate estimation window
  int game_round_cap = 10000;

  void validate(int num_classes) const;
};

struct RunConfig {
  ScenarioConfig scenario;
  SchedulerConfig scheduler;
  PlatformDelays delays;
  std::string output_dir = "out";
  std::string workload_file;  // optional pre-generated workload
  int replications = 1;

  void validate() const;
};

struct RunResult {
  std::vector<SojournRecord> trace;  // ordered by (arrival, class, seq)
  std::vector<InstanceRecord> instances;
  ExperimentSummary summary;
};

bool is_known_scheduler(const std::string& name);

/// Runs one simulation to full drainage on the given workload.
RunResult run_experiment(const RunConfig& cfg, const std::vector<Event>& workload);

/// Generates (or loads) the workload, then runs.
RunResult run_experiment(const RunConfig& cfg);

struct SweepCell {
  std::string scheduler;
  double lambda_max = 0.0;
  std::uint64_t seed = 0;
};

/// Runs every cell; cells are independent single-threaded simulations and
/// execute on up to `threads` workers with zero shared state.
std::vector<ExperimentSummary> run_sweep(const RunConfig& base,
                                         const std::vector<SweepCell>& cells,
                                         int threads);

/// Observers for the property suites; null hooks cost nothing.
struct RunObservers {
  std::function<void(const AllocationMap&)> noah_after_tick;
};

RunResult run_experiment(const RunConfig& cfg, const std::vector<Event>& workload,
                         const RunObservers& observers);

}  // namespace faasim
