#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "helt/game/state.hpp"

namespace helt::eval {

struct BehaviorEvent {
  enum class Kind : std::uint8_t { kStart, kHit, kNegated };
  int frame = 0;
  game::Side side = game::Side::kA;  // actor: the skill user or the attacker
  game::SkillSlot slot = game::SkillSlot::kNone;
  Kind kind = Kind::kStart;
  int damage = 0;
  std::array<int, 2> hp{};
  std::array<double, 2> energy{};

  friend bool operator==(const BehaviorEvent&, const BehaviorEvent&) = default;
};

struct BehaviorLog {
  std::array<int, 2> char_ids{};
  // Highest-damage offensive skill of each side's character.
  std::array<game::SkillSlot, 2> special{game::SkillSlot::kSkill3, game::SkillSlot::kSkill3};
  std::array<int, 2> substitute_window{10, 10};
  int frames = 0;
  game::Outcome outcome = game::Outcome::kOngoing;
  std::vector<BehaviorEvent> events;

  friend bool operator==(const BehaviorLog&, const BehaviorLog&) = default;
};

// Builds the static part of a log from the two characters.
BehaviorLog begin_log(const game::CharacterSpec& a, const game::CharacterSpec& b);
void append_step(BehaviorLog& log, int frame, const game::StepInfo& info, const game::GameState& after);

struct BehaviorConfig {
  int opening_window = 90;
  int counter_window = 60;  // frames after a negation in which the punish must land
};

struct BehaviorScores {
  double substitution = 0.0;
  double special = 0.0;
  double blitz = 0.0;
  double counter = 0.0;
  double attack = 0.0;
  double error_rate = 0.0;  // 1 - substitution

  friend bool operator==(const BehaviorScores&, const BehaviorScores&) = default;
};

inline constexpr std::array<const char*, 6> kMetricNames{"substitution", "special", "blitz",
                                                         "counter",      "attack",  "error_rate"};
double metric(const BehaviorScores& s, int index);

// Scores for one side of a finished match. Metrics without qualifying
// events score 0.
BehaviorScores behavior_scores(const BehaviorLog& log, game::Side side, const BehaviorConfig& cfg = {});

struct CdfPoint {
  double x = 0.0;
  double p = 0.0;
};

// Empirical CDF: one point per distinct score, height = fraction <= x.
std::vector<CdfPoint> empirical_cdf(std::span<const double> scores);
double ks_statistic_uniform(std::span<const double> scores);

// CSV "metric,population,x,cdf" over every metric and population.
std::string cdf_report(const std::map<std::string, std::vector<BehaviorScores>>& populations);

std::string log_to_json(const BehaviorLog& log);
BehaviorLog log_from_json(const std::string& text);

}  // namespace helt::eval
