#include "doctest.h"

#include <functional>
#include <stdexcept>
#include <vector>

#include "faasim/sim_clock.hpp"

using namespace faasim;

TEST_CASE("events fire in time order") {
  SimClock clock;
  std::vector<int> order;
  clock.schedule_at(2.0, [&] { order.push_back(2); });
  clock.schedule_at(1.0, [&] { order.push_back(1); });
  clock.schedule_at(3.0, [&] { order.push_back(3); });
  clock.run();
  CHECK(order == std::vector<int>{1, 2, 3});
  CHECK(clock.now() == 3.0);
}

TEST_CASE("simultaneous events fire in scheduling order") {
  SimClock clock;
  std::vector<int> order;
  for (int i = 0; i < 5; ++i) {
    clock.schedule_at(1.0, [&order, i] { order.push_back(i); });
  }
  clock.run();
  CHECK(order == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("cancel removes a pending event") {
  SimClock clock;
  int fired = 0;
  auto h = clock.schedule_at(1.0, [&] { ++fired; });
  clock.schedule_at(0.5, [&] { clock.cancel(h); });
  clock.run();
  CHECK(fired == 0);
}

TEST_CASE("time never moves backwards") {
  SimClock clock;
  clock.schedule_at(1.0, [&] {
    CHECK_THROWS_AS(clock.schedule_at(0.5, [] {}), std::logic_error);
    clock.schedule_after(0.0, [] {});  // same-time cascade is fine
  });
  clock.run();
  CHECK(clock.now() == 1.0);
}

TEST_CASE("callbacks can schedule more events") {
  SimClock clock;
  int depth = 0;
  std::function<void()> chain = [&] {
    if (++depth < 10) clock.schedule_after(0.1, chain);
  };
  clock.schedule_at(0.0, chain);
  clock.run();
  CHECK(depth == 10);
  CHECK(clock.now() == doctest::Approx(0.9));
}
