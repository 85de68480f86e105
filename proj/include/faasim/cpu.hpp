#pragma once

#include <cstdint>
#include <functional>
#include <map>

#include "faasim/sim_clock.hpp"

namespace faasim {

using ExecId = std::uint64_t;

enum class ExecKind { Compute, MemRead, MemWrite, Setup };

enum class ExecStatus { Completed, Aborted };

using CompletionFn = std::function<void(ExecStatus)>;

/// Work-conserving processor-sharing CPU with n cores. Each of the m
/// running executions progresses at rate min(1, n/m); the engine
/// recomputes completion horizons whenever the running set changes, so
/// progress is exact (no time-stepping error).
class CpuSet {
 public:
  CpuSet(SimClock& clock, int cores);

  CpuSet(const CpuSet&) = delete;
  CpuSet& operator=(const CpuSet&) = delete;

  /// Demand is in CPU-seconds. The callback fires when the execution
  /// completes or is aborted; it may submit further executions.
  ExecId submit(double demand, ExecKind kind, CompletionFn on_done);

  /// Removes the execution from the running set, keeping its remaining
  /// demand (preempted reads resume where they left off).
  void pause(ExecId id);
  void resume(ExecId id);

  /// Aborts a running or paused execution; its callback receives Aborted.
  void abort(ExecId id);

  bool exists(ExecId id) const { return execs_.count(id) != 0; }
  int cores() const { return cores_; }
  int running_count() const { return running_; }

  /// Total CPU-seconds of work delivered so far (completed demands plus
  /// progress of in-flight executions), derived from per-execution state.
  double delivered_work() const;

  /// Independent route: time integral of min(cores, running).
  double capacity_integral() const;

 private:
  struct Exec {
    double demand;
    double remaining;
    ExecKind kind;
    CompletionFn on_done;
    bool running;
  };

  void sync_progress();
  void reschedule();
  void on_completion_event();
  double current_rate() const;

  SimClock& clock_;
  int cores_;
  ExecId next_id_ = 1;
  std::map<ExecId, Exec> execs_;
  int running_ = 0;
  SimTime last_sync_ = 0.0;
  SimClock::Handle pending_{};
  double completed_work_ = 0.0;
  double capacity_integral_ = 0.0;
};

}  // namespace faasim
