#include "doctest.h"

#include <memory>
#include <vector>

#include "faasim/worker.hpp"

using namespace faasim;

namespace {

// One worker plus repository, items for two classes, fixed warm-start
// delay so timings are exact.
struct Bench {
  SimClock clock;
  std::unique_ptr<Node> node;
  std::unique_ptr<Node> repo;
  std::unique_ptr<DataLayer> data;
  PlatformDelays delays;
  std::vector<ClassSpec> classes;
  std::vector<SojournRecord> completed;
  std::vector<std::pair<int, double>> setups;  // (class, creation I)
  std::unique_ptr<WorkerBase> worker;

  explicit Bench(bool noah = false, int concurrency = 32, int pool = 32,
                 double mem_mb = 48000) {
    node = std::make_unique<Node>(clock, 0, 16, mem_mb, 12800);
    repo = std::make_unique<Node>(clock, DataLayer::kRepository, 1 << 20, 1e12,
                                  12800);
    data = std::make_unique<DataLayer>(clock, std::vector<Node*>{node.get()},
                                       repo.get(), 12800, 711, 1135);
    delays.warm_start_min_s = 0.010;  // fixed draw
    delays.warm_start_max_s = 0.010;
    for (int k = 0; k < 2; ++k) {
      std::string sfx = std::to_string(k);
      data->register_item({"image:" + sfx, 290, {}, 0, 0, 0});
      data->register_item({"runtime:" + sfx, 140, {}, 0, 0, 0});
      data->register_item({"code:" + sfx,
                           1,
                           {"image:" + sfx, "runtime:" + sfx},
                           0,
                           0,
                           delays.cold_cache_init_s});
      ClassSpec spec;
      spec.class_id = k;
      spec.code_item = "code:" + sfx;
      spec.footprint_mb = 430;
      classes.push_back(spec);
    }
    WorkerHooks hooks;
    hooks.on_completed = [this](const SojournRecord& r) {
      completed.push_back(r);
    };
    hooks.on_instance_created = [this](int cls, double setup) {
      setups.emplace_back(cls, setup);
    };
    if (noah) {
      hooks.mu_hat = [](int) { return 5.0; };
      hooks.mean_setup = [](int) { return 0.782; };
      worker = std::make_unique<NoahInvoker>(clock, *node, *data, classes,
                                             delays, concurrency, pool,
                                             RandomStream(3), hooks);
    } else {
      worker = std::make_unique<OwInvoker>(clock, *node, *data, classes,
                                           delays, concurrency, pool,
                                           RandomStream(3), hooks);
    }
  }

  EventCtxPtr submit(int cls, int seq, double demand = 0.2) {
    auto e = std::make_shared<EventCtx>();
    e->ev.class_id = cls;
    e->ev.seq = seq;
    e->ev.arrival_s = clock.now();
    e->ev.demand_s = demand;
    e->rec.class_id = cls;
    e->rec.seq = seq;
    e->rec.arrival_s = clock.now();
    worker->enqueue(e);
    return e;
  }
};

}  // namespace

TEST_CASE("first instance on an empty worker pays the full cold start") {
  Bench b;
  b.submit(0, 0);
  b.clock.run();
  REQUIRE(b.setups.size() == 1);
  // Replication completes with the cold code pull (1.475 s + 1/711),
  // then reads overlap the 0.482 s container-creation workload.
  double expected = 1.475 + 1.0 / 711.0 + 0.482;
  CHECK(b.setups[0].second == doctest::Approx(expected).epsilon(1e-6));
  // Within the measured Python cold-start range.
  CHECK(b.setups[0].second >= 0.448 + 0.307);
  CHECK(b.setups[0].second <= 1.370 + 0.612);
  REQUIRE(b.completed.size() == 1);
  const auto& r = b.completed[0];
  CHECK(r.setup_s == doctest::Approx(expected).epsilon(1e-6));
  CHECK(r.execution_s == doctest::Approx(0.2 + 0.010));  // warm launch in B
  CHECK(r.waiting_s == doctest::Approx(0.0));
}

TEST_CASE("second instance of the class needs no network replication") {
  Bench b;
  b.submit(0, 0);
  b.clock.run();
  double cold = b.setups[0].second;
  // Two more events while the pool has one (busy) instance force a
  // second creation with everything already local.
  b.submit(0, 1);
  b.submit(0, 2);
  b.clock.run();
  REQUIRE(b.setups.size() >= 2);
  double second = b.setups[1].second;
  CHECK(second < cold);
  CHECK(second >= 0.482);  // lower-bounded by the extra creation workload
  CHECK(second == doctest::Approx(0.482).epsilon(1e-6));
}

TEST_CASE("a paused instance resumes instead of cold starting") {
  Bench b;
  b.submit(0, 0);
  b.clock.run_until(10.0);
  b.submit(0, 1);
  b.clock.run_until(20.0);
  REQUIRE(b.completed.size() == 2);
  CHECK(b.setups.size() == 1);  // no second creation
  const auto& r = b.completed[1];
  CHECK(r.setup_s == doctest::Approx(b.delays.resume_s));  // ~8.6 ms
  CHECK(r.execution_s == doctest::Approx(0.2 + 0.010));
}

TEST_CASE("setup times order cold above resume above warm launch") {
  Bench b;
  b.submit(0, 0);
  b.clock.run_until(10.0);
  b.submit(0, 1);
  b.clock.run_until(20.0);
  double cold_i = b.completed[0].setup_s;
  double resume_i = b.completed[1].setup_s;
  // A warm start needs neither creation nor resume; its per-event
  // process launch counts against execution time, so its setup is zero.
  double warm_i = 0.0;
  CHECK(cold_i > resume_i);
  CHECK(resume_i > warm_i);
  CHECK(b.completed[1].execution_s > 0.2);  // launch delay inside B
}

TEST_CASE("16 concurrent events run at full speed, 32 at half speed") {
  Bench b;
  // Prime one instance per... use class 0 with 32 instances: warm the
  // pool by running events until 32 instances exist is slow; instead
  // check the PS effect directly through execution times.
  b.submit(0, 0);
  b.clock.run();
  // 32 warm events at once: the pool holds 1 paused instance; the
  // invoker creates 31 more (everything local), then all execute
  // concurrently, sharing 16 cores.
  for (int i = 0; i < 32; ++i) b.submit(0, 100 + i);
  b.clock.run();
  REQUIRE(b.completed.size() == 33);
  int halved = 0;
  for (std::size_t i = 1; i < b.completed.size(); ++i) {
    if (b.completed[i].execution_s > 0.35) ++halved;
  }
  CHECK(halved > 16);  // most of the batch saw substantial sharing
}

TEST_CASE("idle instances are evicted after the timeout") {
  Bench b;
  b.submit(0, 0);
  b.clock.run_until(10.0);
  CHECK(b.worker->pooled() == 1);
  double done = b.completed[0].completion_s();
  b.clock.run_until(done + 301.0);  // past the 300 s idle timeout
  CHECK(b.worker->pooled() == 0);
  b.submit(0, 1);
  b.clock.run_until(done + 320.0);
  CHECK(b.setups.size() == 2);  // a fresh creation
}

TEST_CASE("reuse resets the idle timeout") {
  Bench b;
  b.submit(0, 0);
  b.clock.run_until(10.0);
  double done = b.completed[0].completion_s();
  // Reuse at +299 s: the timer resets, the instance survives past 301.
  b.clock.schedule_at(done + 299.0, [&] { b.submit(0, 1); });
  b.clock.run_until(done + 310.0);
  CHECK(b.completed.size() == 2);
  CHECK(b.setups.size() == 1);  // still the one instance
  CHECK(b.worker->pooled() == 1);
  b.clock.run();  // the reset timer eventually evicts it
  CHECK(b.worker->pooled() == 0);
}

TEST_CASE("a full pool evicts the least recently used paused instance") {
  Bench b(false, 32, /*pool=*/1);
  b.submit(0, 0);
  b.clock.run_until(10.0);
  REQUIRE(b.worker->pooled() == 1);
  // A different class arrives; the pool is full, so the paused instance
  // of class 0 is churned out.
  auto e = b.submit(1, 0);
  b.clock.run_until(20.0);
  CHECK(b.completed.size() == 2);
  CHECK(e->rec.churn);
  CHECK(b.worker->pooled() == 1);
  CHECK(b.setups.size() == 2);
}

TEST_CASE("memory pressure evictions count as churn too") {
  // Memory sized so the second class's creation must displace the first
  // class's paused instance footprint, not just its item replicas.
  Bench b(false, 32, 32, /*mem=*/1200);
  b.submit(0, 0);
  b.clock.run_until(10.0);
  auto e = b.submit(1, 0);
  b.clock.run_until(20.0);
  CHECK(b.completed.size() == 2);
  CHECK(e->rec.churn);
}

TEST_CASE("NOAH leaves events queued when the queue drains faster than a setup") {
  Bench b(true, 16, 32);
  b.submit(0, 0);
  b.clock.run();
  CHECK(b.setups.size() == 1);
  // Two busy events and one queued: drain estimate 1/(2*5) = 0.1 s is
  // below the 0.782 s setup estimate, so no third instance is launched.
  b.submit(0, 1);
  b.submit(0, 2);  // created: only 1 paused instance; launch rule fires once
  b.clock.run();
  CHECK(b.worker->queued() == 0);
  CHECK(b.completed.size() == 3);
}

TEST_CASE("NOAH reports a free instance when its queue drains") {
  Bench b(true, 16, 32);
  int reports = 0;
  // Rewire the hook to count reports (rebuild the worker).
  WorkerHooks hooks;
  hooks.on_completed = [&](const SojournRecord& r) { b.completed.push_back(r); };
  hooks.on_free_report = [&](int, int) { ++reports; };
  hooks.mu_hat = [](int) { return 5.0; };
  hooks.mean_setup = [](int) { return 0.782; };
  b.worker = std::make_unique<NoahInvoker>(b.clock, *b.node, *b.data,
                                           b.classes, b.delays, 16, 32,
                                           RandomStream(3), hooks);
  b.submit(0, 0);
  b.clock.run_until(10.0);
  CHECK(reports == 1);
  CHECK(b.worker->free_reports(0) == 1);
  b.worker->consume_free_report(0);
  CHECK(b.worker->free_reports(0) == 0);
}
