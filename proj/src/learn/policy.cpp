#include "helt/learn/policy.hpp"

#include "helt/core/error.hpp"
#include "helt/game/arena.hpp"

namespace helt::learn {

game::ActionTriple hold_movement(const game::ActionTriple& decided, const game::ActionMask& mask) {
  game::ActionTriple a;
  if (mask.ud(decided.ud)) a.ud = decided.ud;
  if (mask.lr(decided.lr)) a.lr = decided.lr;
  return a;
}

NeuralPolicy::NeuralPolicy(std::shared_ptr<const PolicyParams> params, enc::IdTable ids, bool greedy)
    : params_(std::move(params)), ids_(std::move(ids)), greedy_(greedy) {
  HELT_EXPECT(params_ != nullptr, "neural policy: null parameters");
}

game::ActionTriple NeuralPolicy::act(const game::GameState& state, game::Side side, Rng& rng) {
  const game::ActionMask mask = game::legal_action_mask(state, side);
  InputBatch batch;
  batch.resize(params_->spec.numeric_dim, params_->spec.id_slots(), 1);
  batch.set(0, enc::encode(state, side, params_->spec.mode, ids_), mask);
  const ForwardCache c = forward_batch(*params_, batch);
  return game::from_head_choices(greedy_ ? greedy_heads(c, 0) : sample_heads(c, 0, rng));
}

RepeatPolicy::RepeatPolicy(std::unique_ptr<Policy> inner, int interval) : inner_(std::move(inner)), interval_(interval) {
  HELT_EXPECT(inner_ != nullptr, "repeat policy: null inner policy");
  HELT_EXPECT(interval_ >= 1, "repeat policy: interval must be >= 1");
}

void RepeatPolicy::begin_match() {
  counter_ = 0;
  last_ = {};
  inner_->begin_match();
}

game::ActionTriple RepeatPolicy::act(const game::GameState& state, game::Side side, Rng& rng) {
  const bool decide = counter_ % interval_ == 0;
  ++counter_;
  if (decide) {
    last_ = inner_->act(state, side, rng);
    return last_;
  }
  return hold_movement(last_, game::legal_action_mask(state, side));
}

}  // namespace helt::learn
