#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "faasim/noncoop.hpp"
#include "faasim/platform_types.hpp"
#include "faasim/queueing.hpp"
#include "faasim/scheduler_ops.hpp"
#include "faasim/worker.hpp"

namespace faasim {

/// Single logical controller with exact, instantaneous worker-state
/// visibility; one subclass per scheduler family.
class Controller {
 public:
  Controller(SimClock& clock, std::vector<WorkerBase*> workers)
      : clock_(clock), workers_(std::move(workers)) {}
  virtual ~Controller() = default;

  virtual int pick_worker(const Event& e) = 0;
  virtual void on_arrival(const Event&) {}
  virtual void on_completed(const SojournRecord&) {}
  virtual void on_tick() {}
  virtual bool wants_ticks() const { return false; }

 protected:
  std::vector<WorkerLoadView> load_views() const;

  SimClock& clock_;
  std::vector<WorkerBase*> workers_;
};

class OpenWhiskController : public Controller {
 public:
  OpenWhiskController(SimClock& clock, std::vector<WorkerBase*> workers,
                      int num_classes, int busy_alpha, RandomStream fallback);

  int pick_worker(const Event& e) override;

 private:
  int busy_alpha_;
  RandomStream fallback_;
  std::vector<std::uint64_t> class_hashes_;
};

class BinPackController : public Controller {
 public:
  BinPackController(SimClock& clock, std::vector<WorkerBase*> workers,
                    BinPackPolicy policy, int capacity)
      : Controller(clock, std::move(workers)), policy_(policy),
        capacity_(capacity) {}

  int pick_worker(const Event& e) override;

 private:
  BinPackPolicy policy_;
  int capacity_;
  int cursor_ = 0;
};

/// Each function class plays for minimum response time; the game over the
/// measured arrival and service rates is replayed every tick and events
/// are dispatched by per-class weighted random choice.
class NoncoopController : public Controller {
 public:
  NoncoopController(SimClock& clock, std::vector<WorkerBase*> workers,
                    int num_classes, int cores, double window_s,
                    double epsilon, int round_cap, RandomStream dispatch);

  int pick_worker(const Event& e) override;
  void on_arrival(const Event& e) override;
  void on_completed(const SojournRecord& r) override;
  void on_tick() override;
  bool wants_ticks() const override { return true; }

  const std::vector<std::vector<double>>& fractions() const {
    return fractions_;
  }
  int last_rounds() const { return last_rounds_; }

 private:
  int cores_;
  double window_s_;
  double epsilon_;
  int round_cap_;
  RandomStream dispatch_;
  std::vector<ClassEstimator> estimators_;
  std::vector<WindowedSamples> worker_completions_;
  std::vector<std::deque<std::pair<double, double>>> busy_snapshots_;
  std::vector<std::vector<double>> fractions_;
  int last_rounds_ = 0;
};

/// NOAH: per-class allocation estimation against the waiting-time
/// threshold, virtual placement with colocation, and ratio dispatch with
/// free-instance reports.
class NoahController : public Controller {
 public:
  NoahController(SimClock& clock, std::vector<WorkerBase*> workers,
                 const std::vector<ClassSpec>& classes, double window_s,
                 double bootstrap_setup_s, int per_worker_cap, int pool_cap,
                 int bootstrap_allocs);

  int pick_worker(const Event& e) override;
  void on_arrival(const Event& e) override;
  void on_completed(const SojournRecord& r) override;
  void on_tick() override;
  bool wants_ticks() const override { return true; }

  double mu_hat(int cls);
  double mean_setup(int cls);
  void record_setup(int cls, double setup_s);

  const AllocationMap& allocations() const { return alloc_; }
  const std::vector<int>& last_targets() const { return last_targets_; }

  /// Invoked after every rebalance tick (invariant checks in tests).
  std::function<void(const AllocationMap&)> after_tick_hook;

 private:
  std::vector<ClassSpec> classes_;
  std::vector<ClassEstimator> estimators_;
  AllocationMap alloc_;
  int per_worker_cap_;
  int pool_cap_;
  int bootstrap_allocs_;
  std::vector<int> last_targets_;
};

}  // namespace faasim
