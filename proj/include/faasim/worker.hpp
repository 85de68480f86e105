#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <vector>

#include "faasim/data_layer.hpp"
#include "faasim/platform_types.hpp"
#include "faasim/random.hpp"

namespace faasim {

enum class InstanceState { Starting, Idle, Busy, Paused, Evicted };

/// A pooled function instance bound to one worker (y_{c,w}).
struct Instance {
  std::uint64_t id = 0;
  int class_id = 0;
  int worker = -1;
  InstanceState state = InstanceState::Starting;
  double created_at = 0.0;
  double setup_s = 0.0;          // creation I once idle
  double last_finished_s = 0.0;
  double last_completion = 0.0;
  double busy_s = 0.0;
  int events_served = 0;
  AllocId footprint = 0;
  long evictions_at_start = 0;   // churn attribution for the creation span
  EventCtxPtr bound;             // event the creation was started for
  SimClock::Handle timeout{};
};

/// Per-worker hooks into the controller layer.
struct WorkerHooks {
  std::function<void(const SojournRecord&)> on_completed;
  std::function<void(int cls, int worker)> on_free_report;       // NOAH
  std::function<double(int cls)> mu_hat;                          // NOAH drain rule
  std::function<double(int cls)> mean_setup;                      // NOAH drain rule
  std::function<void(int cls, double setup_s)> on_instance_created;
  std::function<double(int cls, int worker)> extra_execution;     // sync penalty
};

/// Instance pool, lifecycle and invocation machinery shared by the
/// invoker flavors. Instances are paused immediately after each
/// invocation and evicted after the idle timeout; creating an instance on
/// a full pool evicts the least-recently-used paused instance (churn).
class WorkerBase {
 public:
  WorkerBase(SimClock& clock, Node& node, DataLayer& data,
             const std::vector<ClassSpec>& classes,
             const PlatformDelays& delays, int concurrency_limit,
             int pool_limit, RandomStream warm_stream, WorkerHooks hooks);
  virtual ~WorkerBase() = default;

  virtual void enqueue(EventCtxPtr e) = 0;
  virtual int queued() const = 0;
  virtual int queued_of(int cls) const = 0;

  int id() const { return node_.id; }
  int active() const { return active_; }    // busy + starting (N_w)
  int pooled() const { return pooled_; }    // C_w
  int active_of(int cls) const;
  int paused_of(int cls) const;
  int concurrency_limit() const { return concurrency_limit_; }
  int pool_limit() const { return pool_limit_; }

  /// Time integral of [N_w > 0], for the measured machine service rate.
  double busy_integral() const;

  int free_reports(int cls) const;
  void consume_free_report(int cls);

  /// Fails any busy instance of a class depending on the evicted item.
  void on_replica_evicted(const std::string& item);

  /// Finalized plus live instance records, for the post-run metrics.
  std::vector<InstanceRecord> instance_records() const;

  long creations() const { return creations_; }

 protected:
  // Starts creation for the event's class; returns false when the pool
  // is saturated with unevictable instances. Sets the event's churn flag
  // if another instance had to go. A bound event runs on the instance as
  // soon as it turns idle; an unbound creation only grows the pool and
  // the queue keeps its head-of-line order.
  bool create_instance(EventCtxPtr ectx, bool bind = true);

  // Runs the event on an existing idle or paused instance.
  void run_on_instance(Instance& inst, EventCtxPtr ectx);

  Instance* find_available(int cls);
  Instance* lru_paused_victim();
  void evict_instance(Instance& inst, bool churn);

  virtual void after_completion(int cls) = 0;
  virtual void on_bound_creation_failed(EventCtxPtr ectx) = 0;
  virtual void on_instance_ready(int cls) { (void)cls; }

  void mark_dequeued(EventCtx& e);

  SimClock& clock_;
  Node& node_;
  DataLayer& data_;
  const PlatformDelays& delays_;
  std::map<int, ClassSpec> classes_;
  int concurrency_limit_;
  int pool_limit_;
  RandomStream warm_stream_;
  WorkerHooks hooks_;

 private:
  void finish_creation(std::uint64_t inst_id);
  void start_execution(std::uint64_t inst_id, EventCtxPtr ectx);
  void complete(std::uint64_t inst_id, EventCtxPtr ectx, double exec_start);
  void read_item(const std::string& name, std::function<void(bool)> leg);
  void set_active(int delta);
  void finalize_record(const Instance& inst);
  void clamp_free_reports(int cls);

  std::uint64_t next_instance_id_ = 1;
  std::map<std::uint64_t, Instance> instances_;
  std::map<int, int> active_by_class_;
  std::map<int, int> paused_by_class_;
  std::map<int, int> free_reported_;
  int active_ = 0;
  int pooled_ = 0;
  long creations_ = 0;
  long instance_evictions_ = 0;
  double busy_since_ = 0.0;
  double busy_integral_ = 0.0;
  std::vector<InstanceRecord> archive_;

  friend class NoahInvoker;
  friend class OwInvoker;
};

/// The OpenWhisk-style invoker: one FCFS queue; dequeuing may resume a
/// paused instance of the head event's class or evict a paused instance
/// to cold-start a new one.
class OwInvoker : public WorkerBase {
 public:
  using WorkerBase::WorkerBase;

  void enqueue(EventCtxPtr e) override;
  int queued() const override { return static_cast<int>(queue_.size()); }
  int queued_of(int cls) const override;

 protected:
  void after_completion(int) override { pump(); }
  void on_bound_creation_failed(EventCtxPtr ectx) override;

 private:
  void pump();
  std::deque<EventCtxPtr> queue_;
};

/// The NOAH invoker: a FCFS queue per class; launching a new instance is
/// weighed against the expected queue drain time.
class NoahInvoker : public WorkerBase {
 public:
  using WorkerBase::WorkerBase;

  void enqueue(EventCtxPtr e) override;
  int queued() const override;
  int queued_of(int cls) const override;

 protected:
  void after_completion(int cls) override;
  void on_bound_creation_failed(EventCtxPtr ectx) override;
  void on_instance_ready(int cls) override;

 private:
  void try_schedule(int cls);
  std::map<int, std::deque<EventCtxPtr>> queues_;
};

}  // namespace faasim
