#include "faasim/queueing.hpp"

#include <algorithm>
#include <cmath>

namespace faasim {

double erlang_c(int servers, double offered_load) {
  if (servers < 1) throw std::invalid_argument("erlang_c: servers must be >= 1");
  if (offered_load < 0) throw std::invalid_argument("erlang_c: negative load");
  if (offered_load >= servers) {
    throw StabilityError("erlang_c: offered load must be below server count");
  }
  if (offered_load == 0.0) return 0.0;
  if (servers == 1) return offered_load;  // C(1, rho) = rho, exactly
  double b = 1.0;
  for (int j = 1; j <= servers; ++j) {
    b = offered_load * b / (j + offered_load * b);
  }
  double rho = offered_load / servers;
  return b / (1.0 - rho * (1.0 - b));
}

double mmc_mean_response(double lambda, double mu, int servers) {
  if (mu <= 0) throw std::invalid_argument("mmc_mean_response: mu must be > 0");
  if (lambda < 0) throw std::invalid_argument("mmc_mean_response: negative lambda");
  if (lambda >= servers * mu) {
    throw StabilityError("mmc_mean_response: unstable (lambda >= c*mu)");
  }
  if (lambda == 0.0) return 1.0 / mu;
  double a = lambda / mu;
  return erlang_c(servers, a) / (servers * mu - lambda) + 1.0 / mu;
}

AllocationEstimate estimate_allocations(const RateEstimate& est, double alpha,
                                        int cap, int bootstrap) {
  if (alpha <= 0) throw std::invalid_argument("estimate_allocations: alpha must be > 0");
  if (cap < 1) throw std::invalid_argument("estimate_allocations: cap must be >= 1");
  AllocationEstimate out;
  if (!est.has_lambda || !est.has_mu || est.sample_count < 1) {
    out.count = std::min(bootstrap, cap);
    out.bootstrapped = true;
    return out;
  }
  double a = est.lambda_hat / est.mu_hat;
  if (est.lambda_hat >= cap * est.mu_hat) {
    out.count = cap;
    out.saturated = true;
    return out;
  }
  int c = std::max(1, static_cast<int>(std::floor(a)) + 1);
  for (; c <= cap; ++c) {
    if (a >= c) continue;
    double wait = erlang_c(c, a) / (c * est.mu_hat - est.lambda_hat);
    if (wait < alpha) {
      out.count = c;
      return out;
    }
  }
  out.count = cap;
  out.saturated = true;
  return out;
}

RateEstimate ClassEstimator::estimate(SimTime now) {
  RateEstimate est;
  est.class_id = class_id_;
  est.sample_count = executions_.count(now);
  if (arrivals_.count(now) >= 2) {
    double elapsed = arrivals_.elapsed(now);
    if (elapsed > 0) {
      est.lambda_hat = arrivals_.count(now) / elapsed;
      est.has_lambda = est.lambda_hat > 0;
    }
  }
  double busy_sum = executions_.sum(now);
  if (est.sample_count >= 1 && busy_sum > 0) {
    est.mu_hat = est.sample_count / busy_sum;
    est.has_mu = true;
  }
  est.mean_setup =
      setups_.count(now) >= 1 ? setups_.mean(now) : bootstrap_setup_;
  return est;
}

}  // namespace faasim
