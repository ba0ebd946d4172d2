#include "helt/eval/bots.hpp"

#include <cmath>

#include "helt/core/error.hpp"
#include "helt/game/arena.hpp"

namespace helt::eval {

game::ActionTriple RandomPolicy::act(const game::GameState& state, game::Side side, Rng& rng) {
  const game::ActionMask mask = game::legal_action_mask(state, side);
  std::array<int, game::kNumHeads> choice{};
  for (int h = 0; h < game::kNumHeads; ++h) {
    std::vector<int> legal;
    for (int k = 0; k < game::kHeadSizes[h]; ++k) {
      if (mask.legal[game::kHeadOffsets[h] + k]) legal.push_back(k);
    }
    choice[h] = legal[std::uniform_int_distribution<std::size_t>(0, legal.size() - 1)(rng)];
  }
  return game::from_head_choices(choice);
}

game::ActionTriple ScriptedAggressive::act(const game::GameState& state, game::Side side, Rng&) {
  const game::ActionMask mask = game::legal_action_mask(state, side);
  const game::FighterState& me = state.fighter(side);
  const game::FighterState& opp = state.fighter(game::other(side));
  const game::CharacterSpec& spec = state.spec(side);
  game::ActionTriple a;
  if (me.stun_remaining > 0 || me.active_skill) return a;
  const game::Vec2 delta{opp.pos.x - me.pos.x, opp.pos.y - me.pos.y};

  game::SkillSlot best = game::SkillSlot::kNone;
  int best_damage = -1;
  for (int i = 0; i < game::kNumSkills; ++i) {
    const game::SkillSlot slot = game::slot_of(i);
    const game::SkillSpec& s = spec.skills[i];
    if (s.kind != game::SkillKind::kMelee && s.kind != game::SkillKind::kProjectile) continue;
    if (!mask.skill(slot) || !game::in_range(state, side, slot)) continue;
    if (s.damage > best_damage) {
      best = slot;
      best_damage = s.damage;
    }
  }
  if (best != game::SkillSlot::kNone) {
    a.skill = best;
    a.direction = static_cast<std::uint8_t>(game::nearest_direction(delta));
    return a;
  }
  const double dist = std::hypot(delta.x, delta.y);
  if (dist < 3.0 && me.buff_remaining == 0 && mask.skill(game::SkillSlot::kSummon)) {
    a.skill = game::SkillSlot::kSummon;
    return a;
  }
  if (delta.x > 0.5) a.lr = game::MoveLR::kRight;
  if (delta.x < -0.5) a.lr = game::MoveLR::kLeft;
  if (delta.y > 0.3) a.ud = game::MoveUD::kUp;
  if (delta.y < -0.3) a.ud = game::MoveUD::kDown;
  return a;
}

DifficultyConfig DifficultyConfig::preset(std::string_view name) {
  if (name == "beginner") return {12, 0.5};
  if (name == "intermediate") return {6, 0.75};
  if (name == "advanced") return {2, 0.95};
  throw ConfigError("unknown difficulty preset '" + std::string(name) + "'");
}

void validate(const DifficultyConfig& cfg) {
  if (cfg.delay_frames < 1) throw ConfigError("difficulty.delay_frames: must be >= 1");
  if (!(cfg.exec_prob >= 0.0 && cfg.exec_prob <= 1.0)) throw ConfigError("difficulty.exec_prob: must be in [0, 1]");
}

DifficultyPolicy::DifficultyPolicy(std::unique_ptr<learn::Policy> inner, DifficultyConfig cfg)
    : inner_(std::move(inner)), cfg_(cfg) {
  HELT_EXPECT(inner_ != nullptr, "difficulty: null inner policy");
  validate(cfg_);
}

void DifficultyPolicy::begin_match() {
  counter_ = 0;
  queries_ = 0;
  inner_->begin_match();
}

game::ActionTriple DifficultyPolicy::act(const game::GameState& state, game::Side side, Rng& rng) {
  const bool query = counter_ % cfg_.delay_frames == 0;
  ++counter_;
  if (!query) return {};
  ++queries_;
  const game::ActionTriple a = inner_->act(state, side, rng);
  if (a == game::kNoAction) return a;
  return uniform01(rng) < cfg_.exec_prob ? a : game::kNoAction;
}

std::vector<game::ActionTriple> apply_difficulty(std::span<const game::ActionTriple> stream,
                                                 const DifficultyConfig& cfg, Rng& rng) {
  validate(cfg);
  std::vector<game::ActionTriple> out(stream.size());
  for (std::size_t f = 0; f < stream.size(); ++f) {
    if (f % cfg.delay_frames != 0 || stream[f] == game::kNoAction) continue;
    if (uniform01(rng) < cfg.exec_prob) out[f] = stream[f];
  }
  return out;
}

}  // namespace helt::eval
