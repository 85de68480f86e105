#include "faasim/noncoop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace faasim {

std::vector<double> best_reply(double phi, const std::vector<double>& residual) {
  const std::size_t n = residual.size();
  if (n == 0) throw std::invalid_argument("best_reply: no machines");
  if (phi <= 0) throw std::invalid_argument("best_reply: phi must be > 0");
  double total = std::accumulate(residual.begin(), residual.end(), 0.0);
  if (total <= phi) {
    throw SaturationError("best_reply: player rate exceeds residual capacity");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (residual[a] != residual[b]) return residual[a] > residual[b];
    return a < b;
  });

  std::vector<double> s(n, 0.0);
  for (std::size_t c = n; c >= 1; --c) {
    double sum_mu = 0.0, sum_sqrt = 0.0;
    for (std::size_t l = 0; l < c; ++l) {
      sum_mu += residual[order[l]];
      sum_sqrt += std::sqrt(residual[order[l]]);
    }
    if (sum_mu <= phi) continue;  // prefix alone cannot carry the player
    double level = (sum_mu - phi) / sum_sqrt;
    // Sorted descending, so the smallest assignment is the prefix tail.
    double mu_last = residual[order[c - 1]];
    double tail = (mu_last - std::sqrt(mu_last) * level) / phi;
    if (tail >= 0.0 || c == 1) {
      std::fill(s.begin(), s.end(), 0.0);
      for (std::size_t l = 0; l < c; ++l) {
        double mu = residual[order[l]];
        s[order[l]] = std::max(0.0, (mu - std::sqrt(mu) * level) / phi);
      }
      double norm = std::accumulate(s.begin(), s.end(), 0.0);
      for (double& v : s) v /= norm;
      return s;
    }
  }
  throw SaturationError("best_reply: no feasible prefix");
}

std::vector<double> residual_rates(const GameState& state, std::size_t j) {
  std::vector<double> res(state.machine_rates);
  for (std::size_t k = 0; k < state.player_rates.size(); ++k) {
    if (k == j) continue;
    if (state.fractions[k].empty()) continue;
    for (std::size_t i = 0; i < res.size(); ++i) {
      res[i] -= state.fractions[k][i] * state.player_rates[k];
    }
  }
  for (double& r : res) r = std::max(r, 0.0);
  return res;
}

double player_response(const GameState& state, std::size_t j) {
  if (state.fractions[j].empty()) {
    return std::numeric_limits<double>::infinity();
  }
  auto res = residual_rates(state, j);
  double t = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    double s = state.fractions[j][i];
    if (s <= 0) continue;
    double margin = res[i] - s * state.player_rates[j];
    if (margin <= 0) return std::numeric_limits<double>::infinity();
    t += s / margin;
  }
  return t;
}

GameResult play_game(GameState state) {
  const std::size_t m = state.player_rates.size();
  const std::size_t n = state.machine_rates.size();
  GameResult out;
  if (state.fractions.size() != m) state.fractions.assign(m, {});
  for (auto& f : state.fractions) {
    if (f.empty() && n == 1) f.assign(1, 1.0);  // single machine: forced split
  }

  std::vector<double> prev_response(m,
                                    std::numeric_limits<double>::quiet_NaN());
  for (std::size_t j = 0; j < m; ++j) {
    if (!state.fractions[j].empty()) {
      prev_response[j] = player_response(state, j);
    }
  }
  for (int round = 1; round <= state.max_rounds; ++round) {
    for (std::size_t j = 0; j < m; ++j) {
      if (state.player_rates[j] <= 0) continue;
      auto res = residual_rates(state, j);
      double res_total = std::accumulate(res.begin(), res.end(), 0.0);
      if (res_total <= state.player_rates[j]) {
        // Saturated player: keep the previous split, shed to queueing.
        if (state.fractions[j].empty()) {
          state.fractions[j].assign(n, 1.0 / n);
        }
      } else {
        state.fractions[j] = best_reply(state.player_rates[j], res);
      }
    }
    // Convergence is judged on end-of-round response estimates, so the
    // round after the last change is the one that notices quiescence.
    double max_change = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (state.player_rates[j] <= 0) continue;
      double t = player_response(state, j);
      double change;
      if (std::isnan(prev_response[j])) {
        change = std::numeric_limits<double>::infinity();
      } else if (std::isinf(t) && std::isinf(prev_response[j])) {
        change = 0.0;  // still saturated, nothing to gain
      } else {
        change = std::fabs(t - prev_response[j]);
      }
      prev_response[j] = t;
      max_change = std::max(max_change, change);
    }
    out.rounds = round;
    if (max_change < state.epsilon) {
      out.converged = true;
      break;
    }
  }
  out.fractions = std::move(state.fractions);
  return out;
}

}  // namespace faasim
