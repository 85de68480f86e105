#include "faasim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <deque>
#include <set>
#include <stdexcept>
#include <thread>

#include "faasim/data_layer.hpp"

namespace faasim {

namespace {

const std::set<std::string> kSchedulers = {"openwhisk", "first-fit",
                                           "next-fit",  "best-fit",
                                           "noncoop",   "noah"};

// Online phi_{k,w}: the class's dispatched-event share per worker over
// the estimation window (the sync-penalty model's fraction).
class DispatchShares {
 public:
  DispatchShares(int num_classes, int num_workers, double window_s)
      : window_s_(window_s), num_workers_(num_workers),
        per_class_(num_classes) {}

  void record(double now, int cls, int worker) {
    auto& d = per_class_[cls];
    d.emplace_back(now, worker);
    trim(d, now);
  }

  double share(double now, int cls, int worker) {
    auto& d = per_class_[cls];
    trim(d, now);
    if (d.empty()) return 0.0;
    int n = 0;
    for (const auto& [t, w] : d) {
      if (w == worker) ++n;
    }
    return static_cast<double>(n) / d.size();
  }

 private:
  void trim(std::deque<std::pair<double, int>>& d, double now) {
    while (!d.empty() && d.front().first < now - window_s_) d.pop_front();
  }
  double window_s_;
  int num_workers_;
  std::vector<std::deque<std::pair<double, int>>> per_class_;
};

}  // namespace

bool is_known_scheduler(const std::string& name) {
  return kSchedulers.count(name) != 0;
}

void SchedulerConfig::validate(int num_classes) const {
  if (!is_known_scheduler(name)) {
    throw std::invalid_argument("unknown scheduler: " + name);
  }
  if (busy_alpha < 1) throw std::invalid_argument("busy_alpha must be >= 1");
  if (alpha_s <= 0) throw std::invalid_argument("alpha must be > 0");
  if (!alpha_per_class.empty() &&
      static_cast<int>(alpha_per_class.size()) != num_classes) {
    throw std::invalid_argument("alpha_per_class size must match num_classes");
  }
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be > 0");
  if (tick_s <= 0) throw std::invalid_argument("tick must be > 0");
  if (oversubscription < 1 || pool_factor < 1) {
    throw std::invalid_argument("factors must be >= 1");
  }
  if (window_s <= 0) throw std::invalid_argument("window must be > 0");
}

void RunConfig::validate() const {
  scenario.validate();
  scheduler.validate(scenario.num_classes);
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
}

RunResult run_experiment(const RunConfig& cfg,
                         const std::vector<Event>& workload) {
  return run_experiment(cfg, workload, RunObservers{});
}

RunResult run_experiment(const RunConfig& cfg,
                         const std::vector<Event>& workload,
                         const RunObservers& observers) {
  cfg.validate();
  const auto& sc = cfg.scenario;

  SimClock clock;
  std::vector<std::unique_ptr<Node>> nodes;
  std::vector<Node*> node_ptrs;
  for (int w = 0; w < sc.num_workers; ++w) {
    nodes.push_back(std::make_unique<Node>(clock, w, sc.cores,
                                           sc.worker_memory_mb,
                                           sc.memory_mbps));
    node_ptrs.push_back(nodes.back().get());
  }
  // The repository never contends for CPU or memory.
  Node repository(clock, DataLayer::kRepository, 1 << 20, 1e12, sc.memory_mbps);

  DataLayer data(clock, node_ptrs, &repository, sc.memory_mbps, sc.disk_mbps,
                 sc.network_mbps);
  std::vector<ClassSpec> classes;
  for (int k = 0; k < sc.num_classes; ++k) {
    std::string suffix = std::to_string(k);
    data.register_item({"image:" + suffix, sc.image_mb, {}, 0, 0, 0});
    data.register_item({"runtime:" + suffix, sc.runtime_mb, {}, 0, 0, 0});
    data.register_item({"code:" + suffix,
                        sc.code_mb,
                        {"image:" + suffix, "runtime:" + suffix},
                        0,
                        0,
                        cfg.delays.cold_cache_init_s});
    ClassSpec spec;
    spec.class_id = k;
    spec.code_item = "code:" + suffix;
    spec.footprint_mb = sc.image_mb + sc.runtime_mb;
    spec.alpha_s = cfg.scheduler.alpha_per_class.empty()
                       ? cfg.scheduler.alpha_s
                       : cfg.scheduler.alpha_per_class[k];
    spec.beta_s = sc.beta_s;
    classes.push_back(spec);
  }

  const bool noah = cfg.scheduler.name == "noah";
  // The OpenWhisk-style invoker oversubscribes the cores; the NOAH
  // worker admits one execution per core and queues the rest.
  const int concurrency =
      noah ? sc.cores : cfg.scheduler.oversubscription * sc.cores;
  const int pool_limit = cfg.scheduler.pool_factor * sc.cores;
  const double bootstrap_setup =
      cfg.delays.container_create_work_s + cfg.delays.function_init_s;

  RunResult result;
  long completed = 0;
  const long total = static_cast<long>(workload.size());
  std::vector<std::vector<bool>> seen(sc.num_classes);
  for (const auto& e : workload) {
    auto& v = seen[e.class_id];
    if (e.seq >= static_cast<int>(v.size())) v.resize(e.seq + 1, false);
  }

  DispatchShares shares(sc.num_classes, sc.num_workers,
                        cfg.scheduler.window_s);

  std::vector<std::unique_ptr<WorkerBase>> workers;
  std::vector<WorkerBase*> worker_ptrs;
  std::unique_ptr<Controller> controller;
  NoahController* noah_ctl = nullptr;

  WorkerHooks hooks;
  hooks.on_completed = [&](const SojournRecord& r) {
    auto& v = seen[r.class_id];
    if (v[r.seq]) {
      throw SimulationError("event completed twice: class " +
                            std::to_string(r.class_id) + " seq " +
                            std::to_string(r.seq));
    }
    v[r.seq] = true;
    result.trace.push_back(r);
    ++completed;
    if (controller) controller->on_completed(r);
  };
  hooks.mu_hat = [&](int cls) {
    return noah_ctl ? noah_ctl->mu_hat(cls) : 0.0;
  };
  hooks.mean_setup = [&](int cls) {
    return noah_ctl ? noah_ctl->mean_setup(cls) : bootstrap_setup;
  };

  if (sc.beta_s > 0) {
    hooks.extra_execution = [&](int cls, int worker) {
      double phi = shares.share(clock.now(), cls, worker);
      return classes[cls].beta_s * phi * (1.0 - phi);
    };
  }

  for (int w = 0; w < sc.num_workers; ++w) {
    RandomStream warm = named_stream(sc.seed, "warm:" + std::to_string(w));
    if (noah) {
      workers.push_back(std::make_unique<NoahInvoker>(
          clock, *node_ptrs[w], data, classes, cfg.delays, concurrency,
          pool_limit, warm, hooks));
    } else {
      workers.push_back(std::make_unique<OwInvoker>(
          clock, *node_ptrs[w], data, classes, cfg.delays, concurrency,
          pool_limit, warm, hooks));
    }
    worker_ptrs.push_back(workers.back().get());
  }

  data.replica_evicted_hook = [&](const std::string& name, int location) {
    if (location >= 0) worker_ptrs[location]->on_replica_evicted(name);
  };

  const std::string& name = cfg.scheduler.name;
  if (name == "openwhisk") {
    controller = std::make_unique<OpenWhiskController>(
        clock, worker_ptrs, sc.num_classes, cfg.scheduler.busy_alpha,
        named_stream(sc.seed, "ow_fallback"));
  } else if (name == "first-fit" || name == "next-fit" || name == "best-fit") {
    BinPackPolicy policy = name == "first-fit"  ? BinPackPolicy::FirstFit
                           : name == "next-fit" ? BinPackPolicy::NextFit
                                                : BinPackPolicy::BestFit;
    controller = std::make_unique<BinPackController>(clock, worker_ptrs,
                                                     policy, sc.cores);
  } else if (name == "noncoop") {
    controller = std::make_unique<NoncoopController>(
        clock, worker_ptrs, sc.num_classes, sc.cores, cfg.scheduler.window_s,
        cfg.scheduler.epsilon, cfg.scheduler.game_round_cap,
        named_stream(sc.seed, "noncoop_dispatch"));
  } else {
    // Virtual allocations are concurrent-server estimates, so placement
    // caps them at what a worker can concurrently serve.
    int alloc_cap = cfg.scheduler.noah_alloc_cap > 0
                        ? cfg.scheduler.noah_alloc_cap
                        : sc.cores;
    auto ctl = std::make_unique<NoahController>(
        clock, worker_ptrs, classes, cfg.scheduler.window_s, bootstrap_setup,
        alloc_cap, sc.num_workers * concurrency,
        cfg.scheduler.noah_bootstrap);
    noah_ctl = ctl.get();
    if (observers.noah_after_tick) {
      ctl->after_tick_hook = observers.noah_after_tick;
    }
    controller = std::move(ctl);
  }

  // Dispatch message: a data item of configurable size crossing the
  // network to the worker; constant delay, recorded separately.
  const double msg_delay = (sc.message_kb / 1000.0) / sc.network_mbps;

  for (const auto& ev : workload) {
    clock.schedule_at(ev.arrival_s, [&, ev] {
      controller->on_arrival(ev);
      int w = controller->pick_worker(ev);
      shares.record(clock.now(), ev.class_id, w);
      auto ectx = std::make_shared<EventCtx>();
      ectx->ev = ev;
      ectx->rec.class_id = ev.class_id;
      ectx->rec.seq = ev.seq;
      ectx->rec.arrival_s = ev.arrival_s;
      ectx->rec.dispatch_delay_s = msg_delay;
      clock.schedule_after(msg_delay,
                           [&, ectx, w] { worker_ptrs[w]->enqueue(ectx); });
    });
  }

  // The recurring rebalance tick re-captures itself, so it must outlive
  // the whole clock run.
  std::function<void()> tick;
  if (controller->wants_ticks() && total > 0) {
    tick = [&]() {
      controller->on_tick();
      if (completed < total) {
        clock.schedule_after(cfg.scheduler.tick_s, tick);
      }
    };
    clock.schedule_at(0.0, tick);
  }

  clock.run();

  if (completed != total) {
    throw SimulationError("run ended with " + std::to_string(completed) +
                          " of " + std::to_string(total) +
                          " events completed");
  }

  std::sort(result.trace.begin(), result.trace.end(),
            [](const SojournRecord& a, const SojournRecord& b) {
              if (a.arrival_s != b.arrival_s) return a.arrival_s < b.arrival_s;
              if (a.class_id != b.class_id) return a.class_id < b.class_id;
              return a.seq < b.seq;
            });
  for (auto* w : worker_ptrs) {
    auto records = w->instance_records();
    result.instances.insert(result.instances.end(), records.begin(),
                            records.end());
  }
  std::sort(result.instances.begin(), result.instances.end(),
            [](const InstanceRecord& a, const InstanceRecord& b) {
              if (a.worker != b.worker) return a.worker < b.worker;
              return a.id < b.id;
            });

  result.summary = summarize(result.trace, result.instances,
                             cfg.delays.worker_setup_s);
  result.summary.scheduler = cfg.scheduler.name;
  result.summary.lambda_max = sc.lambda_max;
  result.summary.seed = sc.seed;
  return result;
}

RunResult run_experiment(const RunConfig& cfg) {
  std::vector<Event> workload =
      cfg.workload_file.empty() ? generate_workload(cfg.scenario)
                                : read_workload_file(cfg.workload_file);
  return run_experiment(cfg, workload);
}

std::vector<ExperimentSummary> run_sweep(const RunConfig& base,
                                         const std::vector<SweepCell>& cells,
                                         int threads) {
  std::vector<ExperimentSummary> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mutex;

  auto work = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size() || failed.load()) break;
      try {
        RunConfig cfg = base;
        cfg.scheduler.name = cells[i].scheduler;
        cfg.scenario.lambda_max = cells[i].lambda_max;
        cfg.scenario.seed = cells[i].seed;
        results[i] = run_experiment(cfg).summary;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed = true;
        error = e.what();
      }
    }
  };

  int n = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < n; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failed) throw std::runtime_error("sweep cell failed: " + error);
  return results;
}

}  // namespace faasim
