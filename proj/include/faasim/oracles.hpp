#pragma once

#include <vector>

namespace faasim::oracles {

// Independent cross-checks for the analytic components. These routines
// deliberately avoid the production code paths: the Erlang C check sums
// the state probabilities directly instead of using the recurrence, and
// the best-reply check solves the optimality condition by bisection
// instead of the sorted-prefix closed form. They back `verify --suite
// erlang|oracles` and the test suites; production code never calls them.

/// Erlang C by direct summation:
///   C = (a^c / (c! (1-rho))) / (sum_{j<c} a^j/j! + a^c/(c! (1-rho))).
double erlang_c_direct(int servers, double offered_load);

/// Player's optimal fractions for minimizing sum_i s_i / (mu_i - s_i*phi)
/// subject to sum s_i = 1, s_i >= 0, found by bisecting the equalized
/// marginal-cost level. Requires sum(mu) > phi.
std::vector<double> best_reply_numeric(double phi,
                                       const std::vector<double>& residual);

/// Two-machine variant by golden-section search on s1 alone.
double best_reply_two_machine_search(double phi, double mu1, double mu2);

}  // namespace faasim::oracles
