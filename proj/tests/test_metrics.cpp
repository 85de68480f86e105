#include "doctest.h"

#include <map>
#include <set>
#include <vector>

#include "faasim/metrics.hpp"
#include "faasim/random.hpp"

using namespace faasim;

namespace {
SojournRecord rec(int cls, int seq, double arrival, double w, double i,
                  double b, int worker, std::uint64_t inst) {
  SojournRecord r;
  r.class_id = cls;
  r.seq = seq;
  r.arrival_s = arrival;
  r.waiting_s = w;
  r.setup_s = i;
  r.execution_s = b;
  r.worker = worker;
  r.instance = inst;
  return r;
}
}  // namespace

TEST_CASE("a single event yields degenerate objective sums") {
  std::vector<SojournRecord> trace = {rec(0, 0, 1.0, 0.1, 0.2, 0.3, 0, 1)};
  auto [c1, c2] = eval_instance_objectives(trace);
  CHECK(c1 == doctest::Approx(0.6));
  CHECK(c2 == doctest::Approx(0.6));
}

TEST_CASE("instance resource time spans first arrival to last completion") {
  std::vector<SojournRecord> trace = {
      rec(0, 0, 0.0, 0.0, 0.0, 0.5, 0, 1),   // S = 0.5
      rec(0, 1, 1.0, 0.0, 0.0, 0.2, 0, 1)};  // S = 0.2
  auto [c1, c2] = eval_instance_objectives(trace);
  CHECK(c1 == doctest::Approx(1.2));  // (1.0 + 0.2) - 0.0
  CHECK(c2 == doctest::Approx(0.7));
}

TEST_CASE("an empty trace contributes nothing") {
  auto [c1, c2] = eval_instance_objectives({});
  CHECK(c1 == 0.0);
  CHECK(c2 == 0.0);
}

TEST_CASE("worker resource time adds the setup time per covered worker") {
  // One worker processing in [2, 10]: waiting ends at 2, completion at 10.
  std::vector<SojournRecord> trace = {rec(0, 0, 2.0, 0.0, 1.0, 7.0, 3, 1)};
  auto [c1, c2] = eval_worker_objectives(trace, 1.0);
  CHECK(c1 == doctest::Approx(9.0));  // 10 - 2 + 1
  CHECK(c2 == doctest::Approx(8.0));
}

TEST_CASE("unused workers contribute no resource time") {
  std::vector<SojournRecord> trace = {rec(0, 0, 0.0, 0.0, 0.0, 1.0, 0, 1)};
  auto [c1_with, unused] = eval_worker_objectives(trace, 0.0);
  auto [c1_inst, unused2] = eval_instance_objectives(trace);
  CHECK(c1_with == doctest::Approx(c1_inst));  // single event consistency
}

TEST_CASE("summarize reports utilization as busy over lifespan") {
  std::vector<SojournRecord> trace = {rec(0, 0, 0.0, 0.0, 0.0, 2.0, 0, 1)};
  InstanceRecord inst;
  inst.id = 1;
  inst.worker = 0;
  inst.created_at = 0.0;
  inst.last_completion = 10.0;
  inst.busy_s = 2.0;
  inst.events_served = 1;
  auto s = summarize(trace, {inst}, 0.0);
  CHECK(s.instance_utilization == doctest::Approx(0.2));
  CHECK(s.workers_covered == 1);
  CHECK(s.total_instances == 1);
  CHECK(s.avg_response_s == doctest::Approx(2.0));
}

TEST_CASE("efficiency is invariant under time shifts") {
  RandomStream rng(5);
  std::vector<SojournRecord> trace;
  for (int i = 0; i < 50; ++i) {
    trace.push_back(rec(0, i, rng.uniform(0, 100), rng.uniform(0, 0.1),
                        rng.uniform(0, 0.3), rng.uniform(0.05, 0.4),
                        static_cast<int>(rng.uniform_int(4)), 1 + i % 7));
  }
  auto s1 = summarize(trace, {}, 1.0);
  for (auto& r : trace) r.arrival_s += 1234.5;
  auto s2 = summarize(trace, {}, 1.0);
  CHECK(s1.objectives.efficiency ==
        doctest::Approx(s2.objectives.efficiency).epsilon(1e-9));
}

TEST_CASE("instance objectives match a brute-force recomputation") {
  RandomStream rng(11);
  std::vector<SojournRecord> trace;
  for (int i = 0; i < 100; ++i) {
    trace.push_back(rec(static_cast<int>(rng.uniform_int(3)), i,
                        rng.uniform(0, 50), rng.uniform(0, 0.2),
                        rng.uniform(0, 1.0), rng.uniform(0.05, 0.4),
                        static_cast<int>(rng.uniform_int(4)),
                        1 + rng.uniform_int(10)));
  }
  auto [c1, c2] = eval_instance_objectives(trace);

  // Naive route: enumerate instances, scan the full trace for each.
  std::set<std::uint64_t> ids;
  for (const auto& r : trace) ids.insert(r.instance);
  double brute_c1 = 0;
  for (auto id : ids) {
    double lo = 1e300, hi = -1e300;
    for (const auto& r : trace) {
      if (r.instance != id) continue;
      lo = std::min(lo, r.arrival_s);
      hi = std::max(hi, r.arrival_s + r.sojourn_s());
    }
    brute_c1 += hi - lo;
  }
  double brute_c2 = 0;
  for (const auto& r : trace) brute_c2 += r.sojourn_s();
  CHECK(c1 == doctest::Approx(brute_c1).epsilon(1e-12));
  CHECK(c2 == doctest::Approx(brute_c2).epsilon(1e-12));
}

TEST_CASE("trace CSV carries the accounting identity") {
  auto r = rec(2, 5, 1.5, 0.1, 0.2, 0.3, 1, 9);
  CHECK(r.sojourn_s() == doctest::Approx(0.6));
  CHECK(r.completion_s() == doctest::Approx(1.5 + 0.6 + r.dispatch_delay_s));
  std::string csv = trace_csv_string({r});
  CHECK(csv.find("2,5,1.500000000,0.100000000,0.200000000,0.300000000,"
                 "0.600000000,1,9,0") != std::string::npos);
}
