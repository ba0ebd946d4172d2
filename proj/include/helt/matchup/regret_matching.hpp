#pragma once

#include <string>
#include <utility>
#include <vector>

#include "helt/core/random.hpp"

namespace helt::matchup {

// Character-pair selector. Entry (i, j) pairs opponent character i with
// learner character j; r(i, j) is the smoothed win rate of j.
struct MatchupState {
  int n = 0;
  std::vector<double> wr_ema;   // n*n, row-major in i
  std::vector<double> regret;   // n*n
  std::vector<double> weights;  // n*n, on the simplex
  double gamma_smooth = 0.99;
  double eta = 0.1;

  static MatchupState create(int n, double gamma_smooth = 0.99, double eta = 0.1);

  int at(int i, int j) const { return i * n + j; }
  double wr(int i, int j) const { return wr_ema[at(i, j)]; }
  double w(int i, int j) const { return weights[at(i, j)]; }
  double r(int i, int j) const { return regret[at(i, j)]; }

  friend bool operator==(const MatchupState&, const MatchupState&) = default;
};

void validate(const MatchupState& state);

// r <- r * gamma + [j wins] * (1 - gamma) on entry (i, j) only.
void record_result(MatchupState& state, int i, int j, bool j_wins);

// Sum of r(i, j) * w(i, j) under the current (previous-step) weights.
double expected_utility(const MatchupState& state);

// R <- max(R + r - E, 0); w = (R / sum R)(1 - eta) + eta / n^2, or uniform
// when every regret is zero.
void update_regret_and_weights(MatchupState& state);

std::pair<int, int> sample_pair(const MatchupState& state, Rng& rng);

// CSV with header "i,j,wr_ema,regret,weight".
std::string to_csv(const MatchupState& state);

}  // namespace helt::matchup
