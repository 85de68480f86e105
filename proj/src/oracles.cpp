#include "faasim/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace faasim::oracles {

double erlang_c_direct(int servers, double offered_load) {
  if (servers < 1 || offered_load < 0 || offered_load >= servers) {
    throw std::invalid_argument("erlang_c_direct: invalid arguments");
  }
  if (offered_load == 0.0) return 0.0;
  long double a = offered_load;
  long double term = 1.0L;  // a^j / j!
  long double below = 0.0L;
  for (int j = 0; j < servers; ++j) {
    below += term;
    term *= a / (j + 1);
  }
  long double rho = a / servers;
  long double waiting = term / (1.0L - rho);
  return static_cast<double>(waiting / (below + waiting));
}

namespace {

// sum_i max(0, (mu_i - sqrt(mu_i/eta)) / phi) is continuous and strictly
// increasing in eta wherever positive, so the level with unit sum is found
// by bisection.
double fraction_sum(double eta, double phi, const std::vector<double>& mu) {
  double s = 0.0;
  for (double m : mu) {
    double v = (m - std::sqrt(m / eta)) / phi;
    if (v > 0) s += v;
  }
  return s;
}

}  // namespace

std::vector<double> best_reply_numeric(double phi,
                                       const std::vector<double>& residual) {
  double total = 0.0;
  for (double m : residual) {
    if (m <= 0) throw std::invalid_argument("best_reply_numeric: mu <= 0");
    total += m;
  }
  if (total <= phi) {
    throw std::invalid_argument("best_reply_numeric: infeasible player");
  }
  double lo = 1e-18, hi = 1.0;
  while (fraction_sum(hi, phi, residual) < 1.0) hi *= 2.0;
  for (int i = 0; i < 400; ++i) {
    double mid = 0.5 * (lo + hi);
    if (fraction_sum(mid, phi, residual) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double eta = 0.5 * (lo + hi);
  std::vector<double> s;
  s.reserve(residual.size());
  double sum = 0.0;
  for (double m : residual) {
    double v = std::max(0.0, (m - std::sqrt(m / eta)) / phi);
    s.push_back(v);
    sum += v;
  }
  for (double& v : s) v /= sum;  // renormalize away the bisection residue
  return s;
}

double best_reply_two_machine_search(double phi, double mu1, double mu2) {
  auto objective = [&](double s1) {
    double s2 = 1.0 - s1;
    double r1 = mu1 - s1 * phi;
    double r2 = mu2 - s2 * phi;
    if (r1 <= 0 || r2 <= 0) return std::numeric_limits<double>::infinity();
    return s1 / r1 + s2 / r2;
  };
  double lo = 0.0, hi = 1.0;
  const double inv_phi_ratio = 0.5 * (3.0 - std::sqrt(5.0));  // golden section
  for (int i = 0; i < 200; ++i) {
    double a = lo + inv_phi_ratio * (hi - lo);
    double b = hi - inv_phi_ratio * (hi - lo);
    if (objective(a) < objective(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace faasim::oracles
