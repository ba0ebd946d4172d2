#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "helt/game/state.hpp"

namespace helt::game {

enum class Style : std::uint8_t { kBalanced, kCautious, kAggressive };

std::string_view to_string(Style style);
Style style_from_string(std::string_view text);

inline constexpr double kTerminalRewardFactor = 7.0;

struct StyleReward {
  Style style = Style::kBalanced;
  double w_self = 1.0;
  double w_opp = 1.0;
  double time_penalty = 0.0;  // reward per frame, <= 0

  static StyleReward preset(Style style);
  friend bool operator==(const StyleReward&, const StyleReward&) = default;
};

void validate(const StyleReward& style);

// HP-variation reward for the self side, each fighter's HP normalized by
// its own max_hp:
//   r = (hp_self' - hp_self)/max_self + (hp_opp - hp_opp')/max_opp
// multiplied by kTerminalRewardFactor on the terminal transition.
double base_reward(std::array<int, 2> hp_before, std::array<int, 2> hp_after,
                   std::array<int, 2> max_hp, bool terminal);

// Same, with style weights on the two HP-loss terms plus a per-frame time
// penalty that is not multiplied on the terminal frame. Index 0 is self.
double style_reward(std::array<int, 2> hp_before, std::array<int, 2> hp_after,
                    std::array<int, 2> max_hp, bool terminal, const StyleReward& style);

// Convenience: reward for `self` from a step's HP record.
double step_reward(const GameState& state_after, const HpDelta& hp, bool terminal, Side self,
                   const StyleReward& style);

}  // namespace helt::game
