#include "faasim/verification.hpp"

#include <cmath>
#include <string>

#include "faasim/cpu.hpp"
#include "faasim/noncoop.hpp"
#include "faasim/oracles.hpp"
#include "faasim/queueing.hpp"
#include "faasim/random.hpp"
#include "faasim/sim_clock.hpp"

namespace faasim {

double run_mm_replication(double lambda, double mu, int cores, int executions,
                          std::uint64_t seed) {
  SimClock clock;
  CpuSet cpu(clock, cores);
  // Independent streams for the arrival and the service process.
  RandomStream arrivals = named_stream(seed, "mm:arrivals");
  RandomStream demands = named_stream(seed, "mm:demands");

  double sum_response = 0.0;
  double t = 0.0;
  for (int i = 0; i < executions; ++i) {
    t += arrivals.exponential(lambda);
    double demand = demands.exponential(mu);
    double arrival = t;
    clock.schedule_at(arrival, [&clock, &cpu, &sum_response, arrival, demand] {
      cpu.submit(demand, ExecKind::Compute,
                 [&clock, &sum_response, arrival](ExecStatus) {
                   sum_response += clock.now() - arrival;
                 });
    });
  }
  clock.run();
  return sum_response / executions;
}

MmVerifyResult verify_mm(double lambda, double mu, int cores, int replications,
                         int executions, std::uint64_t base_seed) {
  std::vector<double> means;
  means.reserve(replications);
  for (int r = 0; r < replications; ++r) {
    means.push_back(run_mm_replication(
        lambda, mu, cores, executions,
        seed_for(base_seed, "replication:" + std::to_string(r))));
  }
  MmVerifyResult out;
  out.ci = student_t_ci(means, 0.95);
  out.analytic = mmc_mean_response(lambda, mu, cores);
  out.pass = out.ci.contains(out.analytic);
  out.replications = replications;
  out.executions = executions;
  return out;
}

ErlangVerifyResult verify_erlang(int max_servers, double max_load) {
  ErlangVerifyResult out;
  for (int c = 1; c <= max_servers; ++c) {
    for (double a = 0.05; a < std::min<double>(c, max_load + 1e-12);
         a += 0.05) {
      double fast = erlang_c(c, a);
      double direct = oracles::erlang_c_direct(c, a);
      double rel = std::fabs(fast - direct) / direct;
      out.max_rel_error = std::max(out.max_rel_error, rel);
    }
  }
  // Single server: C(1, rho) equals the utilization exactly.
  for (double rho = 0.1; rho < 1.0; rho += 0.1) {
    if (erlang_c(1, rho) != rho) {
      out.max_rel_error = 1.0;
    }
  }
  out.pass = out.max_rel_error < 1e-12;
  return out;
}

OracleVerifyResult verify_best_reply(int trials, double tolerance,
                                     std::uint64_t seed) {
  OracleVerifyResult out;
  out.trials = trials;
  RandomStream rng(seed);
  for (int t = 0; t < trials; ++t) {
    int machines = 2 + static_cast<int>(rng.uniform_int(4));  // 2..5
    std::vector<double> mu;
    double total = 0.0;
    for (int i = 0; i < machines; ++i) {
      double m = rng.uniform(0.5, 4.0);
      mu.push_back(m);
      total += m;
    }
    double phi = rng.uniform(0.05, 0.95) * total;
    auto closed = best_reply(phi, mu);
    auto numeric = oracles::best_reply_numeric(phi, mu);
    for (int i = 0; i < machines; ++i) {
      out.max_abs_error =
          std::max(out.max_abs_error, std::fabs(closed[i] - numeric[i]));
    }
  }
  out.pass = out.max_abs_error < tolerance;
  return out;
}

}  // namespace faasim
