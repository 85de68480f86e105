#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "faasim/metrics.hpp"
#include "faasim/workload.hpp"

namespace faasim {

/// A mid-run invariant violation (e.g. an instance evicted while
/// executing). Aborts the run with a diagnostic; scenarios are sized so
/// this never fires.
class SimulationError : public std::runtime_error {
 public:
  explicit SimulationError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Platform operation delays, calibrated to OpenWhisk measurements.
struct PlatformDelays {
  double container_create_work_s = 0.482;  // extra CPU work per creation
  double function_init_s = 0.300;          // code-injection delay, timer
  double cold_cache_init_s = 1.475;        // first repository pull of code
  double resume_s = 0.0086;                // container unpause
  double warm_start_min_s = 0.001;         // per-event process launch, uniform
  double warm_start_max_s = 0.020;
  double idle_timeout_s = 300.0;           // paused instance eviction
  double worker_setup_s = 0.0;             // t_W, metrics only
};

/// One registered function class.
struct ClassSpec {
  int class_id = 0;
  std::string code_item;   // carries the dependency list
  double footprint_mb = 430.0;
  double alpha_s = 1e-4;   // NOAH waiting-time threshold
  double beta_s = 0.0;     // synchronization penalty scale
};

/// An event in flight through the platform; the sojourn record is filled
/// in as the event progresses.
struct EventCtx {
  Event ev;
  SojournRecord rec;

  double worker_arrival() const { return rec.arrival_s + rec.dispatch_delay_s; }
};

using EventCtxPtr = std::shared_ptr<EventCtx>;

}  // namespace faasim
