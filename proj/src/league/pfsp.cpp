#include "helt/league/pfsp.hpp"

#include <cmath>

#include "helt/core/error.hpp"

namespace helt::league {

std::string_view to_string(Weighting w) { return w == Weighting::kHard ? "hard" : "var"; }

Weighting weighting_from_string(std::string_view text) {
  if (text == "hard") return Weighting::kHard;
  if (text == "var") return Weighting::kVar;
  throw ConfigError("unknown pfsp weighting '" + std::string(text) + "'");
}

double pfsp_f(double x, Weighting weighting, double p_hard) {
  return weighting == Weighting::kHard ? std::pow(1.0 - x, p_hard) : x * (1.0 - x);
}

std::vector<double> pfsp_weights(std::span<const double> winrates, Weighting weighting, double p_hard) {
  HELT_EXPECT(!winrates.empty(), "pfsp_weights: empty candidate set");
  std::vector<double> f(winrates.size());
  double total = 0.0;
  for (std::size_t i = 0; i < winrates.size(); ++i) {
    HELT_EXPECT(winrates[i] >= 0.0 && winrates[i] <= 1.0, "pfsp_weights: win rate outside [0, 1]");
    f[i] = pfsp_f(winrates[i], weighting, p_hard);
    total += f[i];
  }
  for (double& v : f) v = total > 0.0 ? v / total : 1.0 / static_cast<double>(f.size());
  return f;
}

void WinRateTable::record(const std::string& player, const std::string& opponent, double score) {
  HELT_EXPECT(score >= 0.0 && score <= 1.0, "win rate table: score outside [0, 1]");
  Entry& e = entries_[{player, opponent}];
  e.ema = smoothing_ * e.ema + (1.0 - smoothing_) * score;
  e.weight = smoothing_ * e.weight + (1.0 - smoothing_);
  e.matches += 1;
}

double WinRateTable::winrate(const std::string& player, const std::string& opponent) const {
  const auto it = entries_.find({player, opponent});
  if (it == entries_.end() || it->second.weight <= 0.0) return 0.5;
  return std::min(1.0, std::max(0.0, it->second.ema / it->second.weight));
}

int WinRateTable::matches(const std::string& player, const std::string& opponent) const {
  const auto it = entries_.find({player, opponent});
  return it == entries_.end() ? 0 : it->second.matches;
}

void WinRateTable::forget_player(const std::string& player) {
  std::erase_if(entries_, [&](const auto& kv) { return kv.first.first == player; });
}

}  // namespace helt::league
