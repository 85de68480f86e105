#include "doctest.h"

#include <vector>

#include "faasim/stats.hpp"

using namespace faasim;

TEST_CASE("Student-t interval for a known sample") {
  std::vector<double> xs = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto ci = student_t_ci(xs, 0.95);
  CHECK(ci.mean == doctest::Approx(5.5));
  // t(0.975, 9) = 2.262157..., stderr = 3.0276504 / sqrt(10)
  CHECK(ci.lo == doctest::Approx(5.5 - 2.2621572 * 0.95742711).epsilon(1e-6));
  CHECK(ci.hi == doctest::Approx(5.5 + 2.2621572 * 0.95742711).epsilon(1e-6));
  CHECK(ci.contains(5.5));
  CHECK_FALSE(ci.contains(10.0));
}

TEST_CASE("Spearman correlation on monotone data") {
  std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> inc = {10, 20, 30, 40, 50};
  std::vector<double> dec = {5, 4, 3, 2, 1};
  CHECK(spearman_rank_correlation(x, inc) == doctest::Approx(1.0));
  CHECK(spearman_rank_correlation(x, dec) == doctest::Approx(-1.0));
}

TEST_CASE("Spearman handles ties with average ranks") {
  std::vector<double> x = {1, 2, 2, 3};
  std::vector<double> y = {1, 3, 3, 4};
  CHECK(spearman_rank_correlation(x, y) == doctest::Approx(1.0));
}
