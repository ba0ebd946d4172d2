#pragma once

#include <map>
#include <string>
#include <utility>

#include "helt/game/state.hpp"

namespace helt::eval {

inline constexpr double kEloStart = 1200.0;
inline constexpr double kEloK = 32.0;

double expected_score(double ra, double rb);

// Standard logistic Elo: E_a = 1 / (1 + 10^((rb - ra) / 400)).
std::pair<double, double> elo_update(double ra, double rb, game::Outcome outcome, double k = kEloK);

// Rating whose expected score against a 0-rated field is p; p is clamped to
// [1/(2n), 1 - 1/(2n)] when n > 0 so the value stays finite.
double performance_rating(double p, int n = 0);

class EloTable {
 public:
  explicit EloTable(double k = kEloK, double initial = kEloStart) : k_(k), initial_(initial) {}

  double rating(const std::string& id) const;
  void set(const std::string& id, double rating) { ratings_[id] = rating; }
  void record(const std::string& a, const std::string& b, game::Outcome outcome);
  const std::map<std::string, double>& ratings() const { return ratings_; }
  double k() const { return k_; }

 private:
  double k_;
  double initial_;
  std::map<std::string, double> ratings_;
};

}  // namespace helt::eval
