#pragma once

#include <stdexcept>
#include <vector>

namespace faasim {

class SaturationError : public std::runtime_error {
 public:
  explicit SaturationError(const std::string& what)
      : std::runtime_error(what) {}
};

/// One player's optimal split (BEST-REPLY) of its arrival rate phi across
/// machines with residual service rates, minimizing its M/M/1 mean
/// response sum_i s_i / (mu_i - s_i*phi) subject to sum s_i = 1, s_i >= 0.
/// Water-filling closed form over the descending-sorted residual rates;
/// the prefix is scanned from all machines down until every assignment in
/// it is non-negative.
std::vector<double> best_reply(double phi, const std::vector<double>& residual);

struct GameState {
  std::vector<double> player_rates;            // Phi_j, events/second
  std::vector<double> machine_rates;           // mu_i, events/second
  std::vector<std::vector<double>> fractions;  // s[j][i]
  double epsilon = 1e-4;
  int max_rounds = 10000;
};

struct GameResult {
  std::vector<std::vector<double>> fractions;
  int rounds = 0;
  bool converged = false;
};

/// Round-robin best replies until the largest change in any player's
/// estimated mean response time over one full round drops below epsilon.
/// Individually infeasible players keep their previous fractions for the
/// round (their load sheds to queueing at dispatch time).
GameResult play_game(GameState state);

/// Player j's estimated mean response under the current fractions, or
/// +inf if its allocation is infeasible.
double player_response(const GameState& state, std::size_t j);

/// Residual machine rates from player j's point of view:
/// mu_i - sum_{k != j} s[k][i] * Phi_k, floored at zero.
std::vector<double> residual_rates(const GameState& state, std::size_t j);

}  // namespace faasim
