#include "helt/eval/elo.hpp"

#include <algorithm>
#include <cmath>

#include "helt/core/error.hpp"

namespace helt::eval {

double expected_score(double ra, double rb) { return 1.0 / (1.0 + std::pow(10.0, (rb - ra) / 400.0)); }

std::pair<double, double> elo_update(double ra, double rb, game::Outcome outcome, double k) {
  HELT_EXPECT(std::isfinite(ra) && std::isfinite(rb), "elo_update: ratings must be finite");
  HELT_EXPECT(outcome != game::Outcome::kOngoing, "elo_update: match is not finished");
  const double sa = outcome == game::Outcome::kAWins ? 1.0 : outcome == game::Outcome::kBWins ? 0.0 : 0.5;
  // Delta rounded to a 2^-32 grid; ratings on that grid sum exactly.
  const double delta = std::ldexp(std::round(std::ldexp(k * (sa - expected_score(ra, rb)), 32)), -32);
  return {ra + delta, rb - delta};
}

double performance_rating(double p, int n) {
  if (n > 0) {
    const double lo = 0.5 / n;
    p = std::clamp(p, lo, 1.0 - lo);
  }
  HELT_EXPECT(p > 0.0 && p < 1.0, "performance_rating: p must be in (0, 1)");
  return 400.0 * std::log10(p / (1.0 - p));
}

double EloTable::rating(const std::string& id) const {
  const auto it = ratings_.find(id);
  return it == ratings_.end() ? initial_ : it->second;
}

void EloTable::record(const std::string& a, const std::string& b, game::Outcome outcome) {
  const auto [ra, rb] = elo_update(rating(a), rating(b), outcome, k_);
  ratings_[a] = ra;
  ratings_[b] = rb;
}

}  // namespace helt::eval
