#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "helt/core/random.hpp"
#include "helt/encoders/encoder.hpp"
#include "helt/game/state.hpp"
#include "helt/learn/network.hpp"

namespace helt::learn {

// Anything that can drive a fighter. act() is called once per frame.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void begin_match() {}
  virtual game::ActionTriple act(const game::GameState& state, game::Side side, Rng& rng) = 0;
};

// Keeps the movement part of `decided` where still legal; the skill and
// direction heads fall back to none. Used between decision frames.
game::ActionTriple hold_movement(const game::ActionTriple& decided, const game::ActionMask& mask);

class NeuralPolicy : public Policy {
 public:
  NeuralPolicy(std::shared_ptr<const PolicyParams> params, enc::IdTable ids, bool greedy = false);
  game::ActionTriple act(const game::GameState& state, game::Side side, Rng& rng) override;

 private:
  std::shared_ptr<const PolicyParams> params_;
  enc::IdTable ids_;
  bool greedy_;
};

// Queries the inner policy every `interval` frames and holds its movement in
// between.
class RepeatPolicy : public Policy {
 public:
  RepeatPolicy(std::unique_ptr<Policy> inner, int interval);
  void begin_match() override;
  game::ActionTriple act(const game::GameState& state, game::Side side, Rng& rng) override;

 private:
  std::unique_ptr<Policy> inner_;
  int interval_;
  int counter_ = 0;
  game::ActionTriple last_{};
};

}  // namespace helt::learn
