#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace helt::league {

enum class Weighting : std::uint8_t { kHard, kVar };

std::string_view to_string(Weighting w);
Weighting weighting_from_string(std::string_view text);

// f_hard(x) = (1 - x)^p, f_var(x) = x (1 - x).
double pfsp_f(double winrate, Weighting weighting, double p_hard);

// Normalized f over the candidates; uniform when every f is zero.
std::vector<double> pfsp_weights(std::span<const double> winrates, Weighting weighting, double p_hard);

// Bias-corrected EMA of match scores (1 win, 0.5 draw, 0 loss) per
// (player, opponent) key pair. Unplayed pairs read as 0.5.
class WinRateTable {
 public:
  explicit WinRateTable(double smoothing = 0.99) : smoothing_(smoothing) {}

  struct Entry {
    double ema = 0.0;
    double weight = 0.0;  // 1 - smoothing^n, the bias correction
    int matches = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  void record(const std::string& player, const std::string& opponent, double score);
  double winrate(const std::string& player, const std::string& opponent) const;
  int matches(const std::string& player, const std::string& opponent) const;
  void forget_player(const std::string& player);

  double smoothing() const { return smoothing_; }
  const std::map<std::pair<std::string, std::string>, Entry>& entries() const { return entries_; }

 private:
  double smoothing_;
  std::map<std::pair<std::string, std::string>, Entry> entries_;
};

}  // namespace helt::league
