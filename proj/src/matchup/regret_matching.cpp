#include "helt/matchup/regret_matching.hpp"

#include <algorithm>
#include <cstdio>

#include "helt/core/error.hpp"

namespace helt::matchup {

MatchupState MatchupState::create(int n, double gamma_smooth, double eta) {
  if (n <= 0) throw ConfigError("matchup: pool size must be > 0");
  if (!(gamma_smooth >= 0.0 && gamma_smooth < 1.0)) throw ConfigError("matchup.gamma: must be in [0, 1)");
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("matchup.eta: must be in [0, 1]");
  const std::size_t cells = static_cast<std::size_t>(n) * n;
  return MatchupState{n, std::vector<double>(cells, 0.5), std::vector<double>(cells, 0.0),
                      std::vector<double>(cells, 1.0 / static_cast<double>(cells)), gamma_smooth, eta};
}

void validate(const MatchupState& s) {
  const std::size_t cells = static_cast<std::size_t>(s.n) * s.n;
  HELT_EXPECT(s.wr_ema.size() == cells && s.regret.size() == cells && s.weights.size() == cells,
              "matchup: matrix sizes do not match n");
}

void record_result(MatchupState& s, int i, int j, bool j_wins) {
  HELT_EXPECT(i >= 0 && i < s.n && j >= 0 && j < s.n, "matchup: index out of range");
  double& r = s.wr_ema[s.at(i, j)];
  r = r * s.gamma_smooth + (j_wins ? 1.0 : 0.0) * (1.0 - s.gamma_smooth);
}

double expected_utility(const MatchupState& s) {
  double e = 0.0;
  for (std::size_t k = 0; k < s.weights.size(); ++k) e += s.wr_ema[k] * s.weights[k];
  return e;
}

void update_regret_and_weights(MatchupState& s) {
  const double e = expected_utility(s);
  double total = 0.0;
  for (std::size_t k = 0; k < s.regret.size(); ++k) {
    s.regret[k] = std::max(s.regret[k] + (s.wr_ema[k] - e), 0.0);
    total += s.regret[k];
  }
  const double uniform = 1.0 / static_cast<double>(s.regret.size());
  for (std::size_t k = 0; k < s.regret.size(); ++k) {
    s.weights[k] = total > 0.0 ? (s.regret[k] / total) * (1.0 - s.eta) + s.eta * uniform : uniform;
  }
}

std::pair<int, int> sample_pair(const MatchupState& s, Rng& rng) {
  const std::size_t k = sample_index(s.weights, rng);
  return {static_cast<int>(k) / s.n, static_cast<int>(k) % s.n};
}

std::string to_csv(const MatchupState& s) {
  std::string out = "i,j,wr_ema,regret,weight\n";
  char line[160];
  for (int i = 0; i < s.n; ++i) {
    for (int j = 0; j < s.n; ++j) {
      std::snprintf(line, sizeof line, "%d,%d,%.9f,%.9f,%.9f\n", i, j, s.wr(i, j), s.r(i, j), s.w(i, j));
      out += line;
    }
  }
  return out;
}

}  // namespace helt::matchup
