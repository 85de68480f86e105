#include "faasim/worker.hpp"

#include <algorithm>
#include <memory>
#include <set>

namespace faasim {

namespace {

// Completes when every registered leg has completed, after seal().
struct Join : std::enable_shared_from_this<Join> {
  int pending = 0;
  bool sealed = false;
  bool failed = false;
  std::function<void(bool)> done;

  std::function<void(bool)> leg() {
    ++pending;
    auto self = shared_from_this();
    return [self](bool ok) {
      if (!ok) self->failed = true;
      if (--self->pending == 0 && self->sealed && self->done) {
        auto d = std::move(self->done);
        d(!self->failed);
      }
    };
  }

  void seal() {
    sealed = true;
    if (pending == 0 && done) {
      auto d = std::move(done);
      d(!failed);
    }
  }
};

}  // namespace

WorkerBase::WorkerBase(SimClock& clock, Node& node, DataLayer& data,
                       const std::vector<ClassSpec>& classes,
                       const PlatformDelays& delays, int concurrency_limit,
                       int pool_limit, RandomStream warm_stream,
                       WorkerHooks hooks)
    : clock_(clock), node_(node), data_(data), delays_(delays),
      concurrency_limit_(concurrency_limit), pool_limit_(pool_limit),
      warm_stream_(warm_stream), hooks_(std::move(hooks)) {
  for (const auto& c : classes) classes_.emplace(c.class_id, c);
}

int WorkerBase::active_of(int cls) const {
  auto it = active_by_class_.find(cls);
  return it == active_by_class_.end() ? 0 : it->second;
}

int WorkerBase::paused_of(int cls) const {
  auto it = paused_by_class_.find(cls);
  return it == paused_by_class_.end() ? 0 : it->second;
}

int WorkerBase::free_reports(int cls) const {
  auto it = free_reported_.find(cls);
  return it == free_reported_.end() ? 0 : it->second;
}

void WorkerBase::consume_free_report(int cls) {
  auto it = free_reported_.find(cls);
  if (it != free_reported_.end() && it->second > 0) --it->second;
}

void WorkerBase::clamp_free_reports(int cls) {
  auto it = free_reported_.find(cls);
  if (it != free_reported_.end()) {
    it->second = std::min(it->second, paused_of(cls));
  }
}

void WorkerBase::set_active(int delta) {
  int before = active_;
  active_ += delta;
  if (before == 0 && active_ > 0) busy_since_ = clock_.now();
  if (before > 0 && active_ == 0) busy_integral_ += clock_.now() - busy_since_;
}

double WorkerBase::busy_integral() const {
  double extra = active_ > 0 ? clock_.now() - busy_since_ : 0.0;
  return busy_integral_ + extra;
}

void WorkerBase::mark_dequeued(EventCtx& e) {
  e.rec.waiting_s = clock_.now() - e.worker_arrival();
}

Instance* WorkerBase::find_available(int cls) {
  Instance* pick = nullptr;
  for (auto& [id, inst] : instances_) {
    if (inst.class_id != cls) continue;
    if (inst.state == InstanceState::Idle && !inst.bound) return &inst;
    if (inst.state == InstanceState::Paused) {
      // Warmest first: most recently finished.
      if (!pick || inst.last_finished_s > pick->last_finished_s) pick = &inst;
    }
  }
  return pick;
}

Instance* WorkerBase::lru_paused_victim() {
  Instance* pick = nullptr;
  for (auto& [id, inst] : instances_) {
    if (inst.state != InstanceState::Paused) continue;
    if (!pick || inst.last_finished_s < pick->last_finished_s) pick = &inst;
  }
  return pick;
}

void WorkerBase::finalize_record(const Instance& inst) {
  InstanceRecord r;
  r.id = inst.id;
  r.class_id = inst.class_id;
  r.worker = inst.worker;
  r.created_at = inst.created_at;
  r.last_completion = inst.last_completion;
  r.busy_s = inst.busy_s;
  r.events_served = inst.events_served;
  archive_.push_back(r);
}

std::vector<InstanceRecord> WorkerBase::instance_records() const {
  std::vector<InstanceRecord> out = archive_;
  for (const auto& [id, inst] : instances_) {
    InstanceRecord r;
    r.id = inst.id;
    r.class_id = inst.class_id;
    r.worker = inst.worker;
    r.created_at = inst.created_at;
    r.last_completion = inst.last_completion;
    r.busy_s = inst.busy_s;
    r.events_served = inst.events_served;
    out.push_back(r);
  }
  return out;
}

void WorkerBase::evict_instance(Instance& inst, bool churn) {
  (void)churn;
  if (inst.state == InstanceState::Busy) {
    throw SimulationError("evicting a busy instance");
  }
  clock_.cancel(inst.timeout);
  if (inst.state == InstanceState::Paused) {
    paused_by_class_[inst.class_id]--;
  } else if (inst.state == InstanceState::Starting ||
             inst.state == InstanceState::Idle) {
    set_active(-1);
    active_by_class_[inst.class_id]--;
  }
  --pooled_;
  AllocId fp = inst.footprint;
  int cls = inst.class_id;
  finalize_record(inst);
  instances_.erase(inst.id);
  node_.mem.free(fp);
  clamp_free_reports(cls);
}

bool WorkerBase::create_instance(EventCtxPtr ectx, bool bind) {
  const int cls = ectx->ev.class_id;
  bool churn = false;
  if (pooled_ >= pool_limit_) {
    Instance* victim = lru_paused_victim();
    if (!victim) return false;
    evict_instance(*victim, true);
    churn = true;
  }
  long evictions_before = instance_evictions_;
  AllocId fp = node_.mem.allocate(classes_.at(cls).footprint_mb);
  churn = churn || instance_evictions_ > evictions_before;
  ectx->rec.churn = ectx->rec.churn || churn;

  std::uint64_t iid = next_instance_id_++;
  Instance& inst = instances_[iid];
  inst.id = iid;
  inst.class_id = cls;
  inst.worker = id();
  inst.state = InstanceState::Starting;
  inst.created_at = clock_.now();
  inst.footprint = fp;
  inst.evictions_at_start = evictions_before;
  if (bind) inst.bound = ectx;
  ++pooled_;
  ++creations_;
  set_active(+1);
  active_by_class_[cls]++;

  node_.mem.subscribe(fp, [this, iid] {
    auto it = instances_.find(iid);
    if (it == instances_.end()) return;
    Instance& victim = it->second;
    if (victim.state == InstanceState::Busy) {
      throw SimulationError("instance footprint evicted while executing");
    }
    ++instance_evictions_;
    clock_.cancel(victim.timeout);
    if (victim.state == InstanceState::Paused) {
      paused_by_class_[victim.class_id]--;
    } else {
      set_active(-1);
      active_by_class_[victim.class_id]--;
    }
    --pooled_;
    EventCtxPtr bound = std::move(victim.bound);
    int vcls = victim.class_id;
    finalize_record(victim);
    instances_.erase(it);
    clamp_free_reports(vcls);
    if (bound) on_bound_creation_failed(bound);
  });

  // Creation completes when the dependencies are replicated and read
  // locally, the container-creation workload is done, and the
  // function-init timer has elapsed (which runs concurrently with the
  // replication).
  auto outer = std::make_shared<Join>();
  outer->done = [this, iid](bool) { finish_creation(iid); };

  auto init_timer_leg = outer->leg();
  clock_.schedule_after(delays_.function_init_s,
                        [init_timer_leg] { init_timer_leg(true); });

  std::vector<std::string> items;
  const auto& code = data_.item(classes_.at(cls).code_item);
  for (const auto& dep : code.dependencies) items.push_back(dep);
  items.push_back(code.name);

  double extra_work = delays_.container_create_work_s;
  double extra_delay = 0.0;
  for (const auto& name : items) {
    extra_work += data_.item(name).init_extra_work_s;
    extra_delay = std::max(extra_delay, data_.item(name).init_extra_delay_s);
  }
  if (extra_delay > 0) {
    auto leg = outer->leg();
    clock_.schedule_after(extra_delay, [leg] { leg(true); });
  }

  auto phase_leg = outer->leg();
  auto dep_join = std::make_shared<Join>();
  dep_join->done = [this, iid, items, extra_work, phase_leg](bool) {
    if (!instances_.count(iid)) {
      phase_leg(false);
      return;
    }
    // Reads the entire code and dependencies once at memory speed, with
    // the container-creation workload running alongside.
    auto init_join = std::make_shared<Join>();
    init_join->done = phase_leg;
    auto work_leg = init_join->leg();
    node_.cpu.submit(extra_work, ExecKind::Setup, [work_leg](ExecStatus s) {
      work_leg(s == ExecStatus::Completed);
    });
    for (const auto& name : items) read_item(name, init_join->leg());
    init_join->seal();
  };
  for (const auto& name : items) {
    auto leg = dep_join->leg();
    data_.ensure_replicated(name, id(), [leg](bool ok) { leg(ok); });
  }
  dep_join->seal();
  outer->seal();
  return true;
}

void WorkerBase::read_item(const std::string& name,
                           std::function<void(bool)> leg) {
  if (!data_.has_replica(name, id())) {
    data_.ensure_replicated(name, id(), [this, name, leg](bool) {
      read_item(name, leg);
    });
    return;
  }
  node_.mem.read(data_.replica_alloc(name, id()), data_.item(name).size_mb,
                 [this, name, leg](ExecStatus s) {
                   if (s == ExecStatus::Completed) {
                     leg(true);
                   } else {
                     // Replica evicted mid-read: re-replicate and retry.
                     read_item(name, leg);
                   }
                 });
}

void WorkerBase::finish_creation(std::uint64_t inst_id) {
  auto it = instances_.find(inst_id);
  if (it == instances_.end()) return;  // evicted mid-creation
  Instance& inst = it->second;
  inst.state = InstanceState::Idle;
  inst.setup_s = clock_.now() - inst.created_at;
  if (hooks_.on_instance_created) {
    hooks_.on_instance_created(inst.class_id, inst.setup_s);
  }
  EventCtxPtr bound = std::move(inst.bound);
  inst.bound = nullptr;
  if (bound) {
    // Replication legs may have displaced instances under memory
    // pressure; that is churn chargeable to this creation.
    if (instance_evictions_ > inst.evictions_at_start) {
      bound->rec.churn = true;
    }
    bound->rec.setup_s += inst.setup_s;
    run_on_instance(inst, bound);
  } else {
    inst.state = InstanceState::Paused;
    set_active(-1);
    active_by_class_[inst.class_id]--;
    paused_by_class_[inst.class_id]++;
    inst.last_finished_s = clock_.now();
    on_instance_ready(inst.class_id);
  }
}

void WorkerBase::run_on_instance(Instance& inst, EventCtxPtr ectx) {
  double pre_delay = 0.0;
  if (inst.state == InstanceState::Paused) {
    clock_.cancel(inst.timeout);
    inst.timeout = {};
    paused_by_class_[inst.class_id]--;
    set_active(+1);
    active_by_class_[inst.class_id]++;
    clamp_free_reports(inst.class_id);
    pre_delay += delays_.resume_s;
    ectx->rec.setup_s += delays_.resume_s;
  }
  inst.state = InstanceState::Busy;
  std::uint64_t iid = inst.id;
  clock_.schedule_after(pre_delay,
                        [this, iid, ectx] { start_execution(iid, ectx); });
}

void WorkerBase::start_execution(std::uint64_t inst_id, EventCtxPtr ectx) {
  auto it = instances_.find(inst_id);
  if (it == instances_.end()) {
    throw SimulationError("instance vanished before execution start");
  }
  // Execution time starts with the handover to the instance; launching
  // the per-event runtime process is part of it.
  double exec_start = clock_.now();
  double warm = warm_stream_.uniform(delays_.warm_start_min_s,
                                     delays_.warm_start_max_s);
  double demand = ectx->ev.demand_s;
  if (hooks_.extra_execution) {
    demand += hooks_.extra_execution(ectx->ev.class_id, id());
  }
  clock_.schedule_after(warm, [this, inst_id, ectx, exec_start, demand] {
    node_.cpu.submit(demand, ExecKind::Compute,
                     [this, inst_id, ectx, exec_start](ExecStatus s) {
                       if (s != ExecStatus::Completed) {
                         throw SimulationError("event execution aborted");
                       }
                       complete(inst_id, ectx, exec_start);
                     });
  });
}

void WorkerBase::complete(std::uint64_t inst_id, EventCtxPtr ectx,
                          double exec_start) {
  Instance& inst = instances_.at(inst_id);
  double b = clock_.now() - exec_start;
  ectx->rec.execution_s = b;
  ectx->rec.worker = id();
  ectx->rec.instance = inst_id;
  inst.events_served += 1;
  inst.busy_s += b;
  inst.last_completion = clock_.now();
  inst.last_finished_s = clock_.now();

  // Paused immediately after the invocation; reuse pays the resume delay.
  inst.state = InstanceState::Paused;
  set_active(-1);
  active_by_class_[inst.class_id]--;
  paused_by_class_[inst.class_id]++;
  node_.mem.touch(inst.footprint);
  double stamp = inst.last_finished_s;
  inst.timeout = clock_.schedule_after(
      delays_.idle_timeout_s, [this, inst_id, stamp] {
        auto it = instances_.find(inst_id);
        if (it == instances_.end()) return;
        if (it->second.state != InstanceState::Paused) return;
        if (it->second.last_finished_s != stamp) return;
        evict_instance(it->second, false);
      });

  int cls = inst.class_id;
  if (hooks_.on_completed) hooks_.on_completed(ectx->rec);
  after_completion(cls);
}

void WorkerBase::on_replica_evicted(const std::string& item) {
  for (auto& [id, inst] : instances_) {
    if (inst.state != InstanceState::Busy) continue;
    const auto& spec = classes_.at(inst.class_id);
    if (spec.code_item == item) {
      throw SimulationError("code item evicted under a busy instance");
    }
    for (const auto& dep : data_.item(spec.code_item).dependencies) {
      if (dep == item) {
        throw SimulationError("dependency evicted under a busy instance");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// OpenWhisk-style invoker: single FCFS queue.

void OwInvoker::enqueue(EventCtxPtr e) {
  queue_.push_back(std::move(e));
  pump();
}

int OwInvoker::queued_of(int cls) const {
  int n = 0;
  for (const auto& e : queue_) {
    if (e->ev.class_id == cls) ++n;
  }
  return n;
}

void OwInvoker::pump() {
  while (!queue_.empty()) {
    if (active() >= concurrency_limit_) return;
    EventCtxPtr head = queue_.front();
    int cls = head->ev.class_id;
    Instance* inst = find_available(cls);
    if (inst) {
      queue_.pop_front();
      mark_dequeued(*head);
      run_on_instance(*inst, head);
      continue;
    }
    if (pooled() >= pool_limit_ && !lru_paused_victim()) {
      return;  // pool saturated with busy or starting instances
    }
    queue_.pop_front();
    mark_dequeued(*head);
    if (!create_instance(head)) {
      queue_.push_front(head);
      return;
    }
  }
}

void OwInvoker::on_bound_creation_failed(EventCtxPtr ectx) {
  queue_.push_front(std::move(ectx));
  pump();
}

// ---------------------------------------------------------------------------
// NOAH invoker: per-class FCFS queues with the queue-or-launch rule.

void NoahInvoker::enqueue(EventCtxPtr e) {
  int cls = e->ev.class_id;
  queues_[cls].push_back(std::move(e));
  try_schedule(cls);
}

int NoahInvoker::queued() const {
  int n = 0;
  for (const auto& [cls, q] : queues_) n += static_cast<int>(q.size());
  return n;
}

int NoahInvoker::queued_of(int cls) const {
  auto it = queues_.find(cls);
  return it == queues_.end() ? 0 : static_cast<int>(it->second.size());
}

void NoahInvoker::try_schedule(int cls) {
  while (true) {
    auto& q = queues_[cls];
    if (q.empty()) return;
    Instance* inst = find_available(cls);
    if (inst) {
      EventCtxPtr head = q.front();
      q.pop_front();
      mark_dequeued(*head);
      run_on_instance(*inst, head);
      continue;
    }
    if (active() >= concurrency_limit_) return;  // no point launching
    int serving = active_of(cls);
    if (serving > 0) {
      double mu = hooks_.mu_hat ? hooks_.mu_hat(cls) : 0.0;
      double setup = hooks_.mean_setup ? hooks_.mean_setup(cls) : 0.0;
      if (mu > 0) {
        // Expected start of the last queued event against a new
        // instance's setup time.
        double drain = static_cast<double>(q.size()) / (serving * mu);
        if (drain < setup) return;  // queue drains first
      } else {
        return;  // no service-rate sample yet; the starting instance serves
      }
    }
    EventCtxPtr head = q.front();
    q.pop_front();
    mark_dequeued(*head);
    if (!create_instance(head)) {
      q.push_front(head);
      return;
    }
  }
}

void NoahInvoker::after_completion(int cls) {
  try_schedule(cls);
  auto it = queues_.find(cls);
  if (it == queues_.end() || it->second.empty()) {
    // Queue drained: report the freed instance to the controller.
    if (paused_of(cls) > free_reports(cls)) {
      free_reported_[cls] += 1;
      if (hooks_.on_free_report) hooks_.on_free_report(cls, id());
    }
    // Then serve the longest queue (possibly switching instance types).
    int best = -1;
    std::size_t len = 0;
    for (const auto& [k, q] : queues_) {
      if (q.size() > len) {
        len = q.size();
        best = k;
      }
    }
    if (best >= 0) try_schedule(best);
  }
}

void NoahInvoker::on_instance_ready(int cls) { try_schedule(cls); }

void NoahInvoker::on_bound_creation_failed(EventCtxPtr ectx) {
  int cls = ectx->ev.class_id;
  queues_[cls].push_front(std::move(ectx));
  try_schedule(cls);
}

}  // namespace faasim
