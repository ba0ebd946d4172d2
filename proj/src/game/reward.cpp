#include "helt/game/reward.hpp"

#include <array>
#include <string>

#include "helt/core/error.hpp"

namespace helt::game {
namespace {
constexpr std::array<std::string_view, 3> kStyleNames{"balanced", "cautious", "aggressive"};

struct HpTerms {
  double self_loss;
  double opp_loss;
};

HpTerms hp_terms(std::array<int, 2> before, std::array<int, 2> after, std::array<int, 2> max_hp) {
  return {static_cast<double>(before[0] - after[0]) / max_hp[0],
          static_cast<double>(before[1] - after[1]) / max_hp[1]};
}
}  // namespace

std::string_view to_string(Style style) { return kStyleNames[static_cast<int>(style)]; }

Style style_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kStyleNames.size(); ++i) {
    if (kStyleNames[i] == text) return static_cast<Style>(i);
  }
  throw ConfigError("unknown reward style '" + std::string(text) + "'");
}

StyleReward StyleReward::preset(Style style) {
  switch (style) {
    case Style::kBalanced: return {Style::kBalanced, 1.0, 1.0, 0.0};
    case Style::kCautious: return {Style::kCautious, 1.5, 0.5, 0.0};
    case Style::kAggressive: return {Style::kAggressive, 0.5, 1.5, -0.0005};
  }
  return {};
}

void validate(const StyleReward& s) {
  if (s.w_self < 0.0) throw ConfigError("style reward: w_self must be >= 0");
  if (s.w_opp < 0.0) throw ConfigError("style reward: w_opp must be >= 0");
  if (s.time_penalty > 0.0) throw ConfigError("style reward: time_penalty must be <= 0");
}

double base_reward(std::array<int, 2> hp_before, std::array<int, 2> hp_after, std::array<int, 2> max_hp,
                   bool terminal) {
  const HpTerms t = hp_terms(hp_before, hp_after, max_hp);
  const double r = -t.self_loss + t.opp_loss;
  return terminal ? kTerminalRewardFactor * r : r;
}

double style_reward(std::array<int, 2> hp_before, std::array<int, 2> hp_after, std::array<int, 2> max_hp,
                    bool terminal, const StyleReward& style) {
  const HpTerms t = hp_terms(hp_before, hp_after, max_hp);
  double r = style.w_opp * t.opp_loss - style.w_self * t.self_loss;
  if (terminal) r *= kTerminalRewardFactor;
  return r + style.time_penalty;
}

double step_reward(const GameState& after, const HpDelta& hp, bool terminal, Side self, const StyleReward& style) {
  const int s = idx(self), o = idx(other(self));
  return style_reward({hp.before[s], hp.before[o]}, {hp.after[s], hp.after[o]},
                      {after.specs[s].max_hp, after.specs[o].max_hp}, terminal, style);
}

}  // namespace helt::game
