#include "doctest.h"

#include <set>
#include <vector>

#include "faasim/random.hpp"
#include "faasim/scheduler_ops.hpp"

using namespace faasim;

namespace {
std::vector<WorkerLoadView> views(const std::vector<int>& loads) {
  std::vector<WorkerLoadView> v;
  for (std::size_t i = 0; i < loads.size(); ++i) {
    v.push_back({static_cast<int>(i), 0, loads[i]});
  }
  return v;
}
}  // namespace

TEST_CASE("step candidates are the integers coprime to the pool size") {
  CHECK(ow_step_candidates(10) == std::vector<int>{1, 3, 7, 9});
  CHECK(ow_step_candidates(7) == std::vector<int>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("an unloaded pool returns the home invoker") {
  RandomStream rng(1);
  for (std::uint64_t h : {0ull, 3ull, 17ull, 123456789ull}) {
    CHECK(ow_select_host(h, views({0, 0, 0, 0, 0, 0, 0, 0, 0, 0}), 16, rng) ==
          static_cast<int>(h % 10));
  }
}

TEST_CASE("probing escalates the busy level before going random") {
  RandomStream rng(1);
  // Home is 0 (h=0, step 1). Worker 0 at 16 (>= alpha), worker 1 below.
  CHECK(ow_select_host(0, views({16, 10, 16, 16}), 16, rng) == 1);
  // All at alpha: second sweep accepts < 2*alpha at the home.
  CHECK(ow_select_host(0, views({16, 16, 16, 16}), 16, rng) == 0);
}

TEST_CASE("a saturated pool falls back to a uniformly random site") {
  RandomStream rng(5);
  std::set<int> seen;
  for (int i = 0; i < 200; ++i) {
    seen.insert(ow_select_host(1, views({48, 48, 48, 48, 48}), 16, rng));
  }
  CHECK(seen.size() == 5);  // every site reachable only via the fallback
}

TEST_CASE("select host never picks a saturated site while one is below 3*alpha") {
  RandomStream rng(9);
  RandomStream gen(10);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> loads;
    bool any_below = false;
    for (int i = 0; i < 10; ++i) {
      int l = static_cast<int>(gen.uniform_int(96));
      loads.push_back(l);
      any_below = any_below || l < 48;
    }
    if (!any_below) continue;
    int w = ow_select_host(gen.uniform_int(1 << 30), views(loads), 16, rng);
    CHECK(loads[w] < 48);
  }
}

TEST_CASE("best fit picks the least residual capacity") {
  auto choice = binpack_select(BinPackPolicy::BestFit, views({3, 7, 12}), 16, 0);
  CHECK(choice.worker == 2);
  CHECK(choice.factor == 1);
}

TEST_CASE("a full pool raises the capacity factor") {
  auto choice =
      binpack_select(BinPackPolicy::FirstFit, views({16, 16, 16}), 16, 0);
  CHECK(choice.factor == 2);
  CHECK(choice.worker == 0);
}

TEST_CASE("next fit scans from the cursor") {
  std::vector<int> loads = {0, 0, 0, 0, 0, 16, 0, 0, 0, 0};
  auto choice = binpack_select(BinPackPolicy::NextFit, views(loads), 16, 5);
  CHECK(choice.worker == 6);
}

TEST_CASE("first fit prefers the lowest index at the minimal factor") {
  auto choice =
      binpack_select(BinPackPolicy::FirstFit, views({5, 2, 9}), 16, 2);
  CHECK(choice.worker == 0);
}

TEST_CASE("empty map colocates a class on the first worker") {
  AllocationMap map(1, 4);
  noah_place_allocations({3}, map, 8);
  CHECK(map.at(0, 0) == 3);
  CHECK(map.class_total(0) == 3);
}

TEST_CASE("scale-in removes from the worker with the fewest allocations") {
  AllocationMap map(1, 3);
  map.add(0, 0, 4);
  map.add(0, 1, 1);
  noah_place_allocations({4}, map, 8);
  CHECK(map.at(0, 0) == 4);
  CHECK(map.at(0, 1) == 0);
}

TEST_CASE("a full worker pushes the next class onto the next worker") {
  AllocationMap map(3, 2);
  map.add(0, 0, 5);
  map.add(1, 0, 3);
  noah_place_allocations({5, 3, 2}, map, 8);
  CHECK(map.at(2, 1) == 2);  // worker 0 is at its cap
  CHECK(map.worker_total(0) == 8);
}

TEST_CASE("scale-out prefers the largest existing block") {
  AllocationMap map(1, 4);
  map.add(0, 1, 2);
  map.add(0, 3, 5);
  noah_place_allocations({9}, map, 8);
  CHECK(map.at(0, 3) == 7);  // grew the biggest block
  CHECK(map.at(0, 1) == 2);
}

TEST_CASE("targets above the pool capacity are capped and flagged") {
  AllocationMap map(2, 2);
  auto result = noah_place_allocations({100, 100}, map, 8);
  CHECK(result.saturated);
  int total = map.class_total(0) + map.class_total(1);
  CHECK(total <= 16);
}

TEST_CASE("placement respects the per-worker cap across random churn") {
  RandomStream rng(12);
  AllocationMap map(5, 4);
  const int cap = 10;
  for (int step = 0; step < 300; ++step) {
    std::vector<int> targets;
    for (int k = 0; k < 5; ++k) {
      targets.push_back(static_cast<int>(rng.uniform_int(12)));
    }
    noah_place_allocations(targets, map, cap);
    for (int w = 0; w < 4; ++w) CHECK(map.worker_total(w) <= cap);
    long total_target = 0;
    for (int t : targets) total_target += t;
    if (total_target <= 4L * cap) {
      for (int k = 0; k < 5; ++k) CHECK(map.class_total(k) == targets[k]);
    }
  }
}

TEST_CASE("fractions sum to one for any placed class") {
  AllocationMap map(2, 3);
  map.add(0, 0, 2);
  map.add(0, 2, 6);
  double sum = 0;
  for (int w = 0; w < 3; ++w) sum += map.fraction(0, w);
  CHECK(sum == doctest::Approx(1.0));
  CHECK(map.fraction(1, 0) == 0.0);  // unplaced class
}
