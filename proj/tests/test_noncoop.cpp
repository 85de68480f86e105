#include "doctest.h"

#include <cmath>
#include <vector>

#include "faasim/noncoop.hpp"
#include "faasim/oracles.hpp"
#include "faasim/random.hpp"

using namespace faasim;

TEST_CASE("homogeneous machines get equal fractions") {
  auto s = best_reply(2.0, {3.0, 3.0, 3.0, 3.0});
  for (double v : s) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("a single machine takes the whole stream") {
  auto s = best_reply(0.7, {1.0});
  REQUIRE(s.size() == 1);
  CHECK(s[0] == doctest::Approx(1.0));
}

TEST_CASE("two-machine split matches the search oracle") {
  auto s = best_reply(1.0, {2.0, 1.0});
  double oracle_s1 = oracles::best_reply_two_machine_search(1.0, 2.0, 1.0);
  CHECK(s[0] == doctest::Approx(oracle_s1).epsilon(1e-6));
  CHECK(s[0] == doctest::Approx(0.8284271247461898).epsilon(1e-9));
  CHECK(s[1] == doctest::Approx(0.17157287525380982).epsilon(1e-9));
}

TEST_CASE("slow machines drop out of the assignment") {
  // With one very slow machine the whole stream goes to the fast ones.
  auto s = best_reply(0.5, {10.0, 10.0, 0.001});
  CHECK(s[2] == doctest::Approx(0.0));
  CHECK(s[0] + s[1] == doctest::Approx(1.0));
}

TEST_CASE("an infeasible player saturates") {
  CHECK_THROWS_AS(best_reply(5.0, {1.0, 1.0}), SaturationError);
}

TEST_CASE("closed form matches the numerical oracle on random instances") {
  RandomStream rng(4242);
  double max_err = 0.0;
  for (int t = 0; t < 200; ++t) {
    int n = 2 + static_cast<int>(rng.uniform_int(4));
    std::vector<double> mu;
    double total = 0;
    for (int i = 0; i < n; ++i) {
      mu.push_back(rng.uniform(0.5, 4.0));
      total += mu.back();
    }
    double phi = rng.uniform(0.05, 0.95) * total;
    auto closed = best_reply(phi, mu);
    auto numeric = oracles::best_reply_numeric(phi, mu);
    for (int i = 0; i < n; ++i) {
      max_err = std::max(max_err, std::fabs(closed[i] - numeric[i]));
    }
  }
  CHECK(max_err < 1e-6);
}

TEST_CASE("homogeneous game converges to uniform fractions within 2 rounds") {
  GameState st;
  st.player_rates = {1.0, 1.5, 0.7};
  st.machine_rates = {2.0, 2.0, 2.0, 2.0};
  auto result = play_game(st);
  CHECK(result.converged);
  CHECK(result.rounds <= 2);
  for (const auto& f : result.fractions) {
    for (double v : f) CHECK(v == doctest::Approx(0.25).epsilon(1e-9));
  }
}

TEST_CASE("one player, one machine finishes in a single round") {
  GameState st;
  st.player_rates = {0.5};
  st.machine_rates = {1.0};
  auto result = play_game(st);
  CHECK(result.converged);
  CHECK(result.rounds == 1);
  CHECK(result.fractions[0][0] == doctest::Approx(1.0));
}

TEST_CASE("heterogeneous games converge under the round cap") {
  RandomStream rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    GameState st;
    int players = 2 + static_cast<int>(rng.uniform_int(9));
    int machines = 2 + static_cast<int>(rng.uniform_int(9));
    double capacity = 0;
    for (int i = 0; i < machines; ++i) {
      st.machine_rates.push_back(rng.uniform(1.0, 2.0));
      capacity += st.machine_rates.back();
    }
    double weight_total = 0;
    std::vector<double> weights;
    for (int j = 0; j < players; ++j) {
      weights.push_back(rng.uniform(1.0, 1.5));
      weight_total += weights.back();
    }
    for (int j = 0; j < players; ++j) {
      st.player_rates.push_back(weights[j] / weight_total * 0.9 * capacity);
    }
    auto result = play_game(st);
    CHECK(result.converged);
    CHECK(result.rounds < st.max_rounds);
    for (const auto& f : result.fractions) {
      double sum = 0;
      for (double v : f) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}
