#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "faasim/stats.hpp"

namespace faasim {

/// One replication: Poisson arrivals at `lambda` with exponential CPU
/// demands at rate `mu` on a processor-sharing worker with `cores`
/// cores; returns the mean response time over `executions` completions.
double run_mm_replication(double lambda, double mu, int cores, int executions,
                          std::uint64_t seed);

struct MmVerifyResult {
  ConfidenceInterval ci;
  double analytic = 0.0;
  bool pass = false;
  int replications = 0;
  int executions = 0;
};

/// Replicated M/M/c check: the 95% Student's-t confidence interval of the
/// replication means must contain the analytic M/M/c mean response.
MmVerifyResult verify_mm(double lambda, double mu, int cores, int replications,
                         int executions, std::uint64_t base_seed);

struct ErlangVerifyResult {
  double max_rel_error = 0.0;
  bool pass = false;
};

/// Recurrence vs direct-summation Erlang C over a (c, a) grid, plus the
/// exact single-server identity C(1, rho) = rho.
ErlangVerifyResult verify_erlang(int max_servers = 64, double max_load = 60.0);

struct OracleVerifyResult {
  double max_abs_error = 0.0;
  int trials = 0;
  bool pass = false;
};

/// Randomized best-reply instances (2-5 machines) against the numerical
/// minimization oracle; fractions must agree within `tolerance`.
OracleVerifyResult verify_best_reply(int trials, double tolerance,
                                     std::uint64_t seed);

}  // namespace faasim
