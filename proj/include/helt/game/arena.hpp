#pragma once

#include <cstdint>

#include "helt/game/state.hpp"

namespace helt::game {

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

// Closed-interval overlap test; touching edges count as contact.
bool intersects(const Rect& a, const Rect& b);

Rect hurtbox_rect(const GameState& state, Side side);
Vec2 direction_vector(int direction);
// Direction index whose unit vector is closest to `delta`.
int nearest_direction(Vec2 delta);

// Hitbox of a melee skill if it were active for `side` right now, using the
// fighter's facing or the given direction for directional skills.
Rect hitbox_rect(const GameState& state, Side side, SkillSlot slot, int direction);

// Whether starting `slot` now would connect with the opponent, aiming
// directional skills straight at them. Ignores legality.
bool in_range(const GameState& state, Side side, SkillSlot slot);

GameState new_match(const CharacterSpec& spec_a, const CharacterSpec& spec_b, int horizon,
                    std::uint64_t seed, const ArenaConfig& arena = {});

ActionMask legal_action_mask(const GameState& state, Side player);

// Advances `state` by one frame in place.
StepInfo advance(GameState& state, const ActionTriple& act_a, const ActionTriple& act_b);

StepResult step(const GameState& state, const ActionTriple& act_a, const ActionTriple& act_b);

Outcome outcome_of(const GameState& state);

}  // namespace helt::game
