#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "helt/learn/policy.hpp"

namespace helt::eval {

// Uniform over the legal entries of each head.
class RandomPolicy : public learn::Policy {
 public:
  game::ActionTriple act(const game::GameState& state, game::Side side, Rng& rng) override;
};

// Walks at the opponent, fires the highest-damage legal skill that would
// connect, summons when close. Never substitutes.
class ScriptedAggressive : public learn::Policy {
 public:
  game::ActionTriple act(const game::GameState& state, game::Side side, Rng& rng) override;
};

// Does nothing, ever.
class IdlePolicy : public learn::Policy {
 public:
  game::ActionTriple act(const game::GameState&, game::Side, Rng&) override { return {}; }
};

struct DifficultyConfig {
  int delay_frames = 1;   // k: query every k-th frame
  double exec_prob = 1.0; // q

  static DifficultyConfig preset(std::string_view name);
  friend bool operator==(const DifficultyConfig&, const DifficultyConfig&) = default;
};

void validate(const DifficultyConfig& cfg);

// Queries the inner policy on every k-th frame and outputs all-none in
// between; a predicted non-none action is dropped with probability 1 - q.
class DifficultyPolicy : public learn::Policy {
 public:
  DifficultyPolicy(std::unique_ptr<learn::Policy> inner, DifficultyConfig cfg);
  void begin_match() override;
  game::ActionTriple act(const game::GameState& state, game::Side side, Rng& rng) override;
  int queries() const { return queries_; }

 private:
  std::unique_ptr<learn::Policy> inner_;
  DifficultyConfig cfg_;
  int counter_ = 0;
  int queries_ = 0;
};

// The same filter over a precomputed per-frame action stream.
std::vector<game::ActionTriple> apply_difficulty(std::span<const game::ActionTriple> stream,
                                                 const DifficultyConfig& cfg, Rng& rng);

}  // namespace helt::eval
