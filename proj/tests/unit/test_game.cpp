#include <gtest/gtest.h>

#include "helt/core/error.hpp"
#include "helt/game/arena.hpp"
#include "helt/game/character.hpp"
#include "helt/game/reward.hpp"

using namespace helt;
using namespace helt::game;

namespace {

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

ActionTriple random_legal(const GameState& s, Side side, Rng& rng) {
  const ActionMask m = legal_action_mask(s, side);
  std::array<int, kNumHeads> c{};
  for (int h = 0; h < kNumHeads; ++h) {
    std::vector<int> legal;
    for (int k = 0; k < kHeadSizes[h]; ++k) {
      if (m.legal[kHeadOffsets[h] + k]) legal.push_back(k);
    }
    c[h] = legal[pick(rng, legal.size())];
  }
  return from_head_choices(c);
}

// A at x=5 facing B, B close enough for the punch hitbox to overlap.
GameState punch_range_state() {
  const CharacterSpec c = template_character();
  GameState s = new_match(c, c, 1800, 3);
  s.fighters[0].pos = {5.0, 5.0};
  s.fighters[1].pos = {6.5, 5.0};
  return s;
}

ActionTriple skill(SkillSlot slot) {
  ActionTriple a;
  a.skill = slot;
  return a;
}

}  // namespace

TEST(Arena, NewMatchIsDeterministic) {
  const auto pool = generate_pool(3, 7);
  EXPECT_EQ(new_match(pool[0], pool[5], 1800, 7), new_match(pool[0], pool[5], 1800, 7));
}

TEST(Arena, ZeroHorizonRejected) {
  const CharacterSpec c = template_character();
  EXPECT_THROW(new_match(c, c, 0, 7), ContractViolation);
}

TEST(Arena, MirrorMatchIsSymmetric) {
  const CharacterSpec c = generate_pool(3, 7)[2];
  const GameState s = new_match(c, c, 1800, 7);
  const FighterState &a = s.fighters[0], &b = s.fighters[1];
  EXPECT_EQ(a.hp, b.hp);
  EXPECT_EQ(a.energy, b.energy);
  EXPECT_EQ(a.cooldown_remaining, b.cooldown_remaining);
  EXPECT_DOUBLE_EQ(a.pos.x, s.arena.width - b.pos.x);
  EXPECT_DOUBLE_EQ(a.pos.y, b.pos.y);
}

TEST(Arena, CooldownMasksSkill) {
  GameState s = punch_range_state();
  s.fighters[0].cooldown_remaining[skill_index(SkillSlot::kSkill1)] = 10;
  EXPECT_FALSE(legal_action_mask(s, Side::kA).skill(SkillSlot::kSkill1));
}

TEST(Arena, FreshMaskRules) {
  const GameState s = punch_range_state();
  const ActionMask m = legal_action_mask(s, Side::kA);
  for (SkillSlot slot : {SkillSlot::kPunch, SkillSlot::kSkill1, SkillSlot::kSkill2, SkillSlot::kSkill3}) {
    EXPECT_TRUE(m.skill(slot)) << to_string(slot);
  }
  EXPECT_FALSE(m.skill(SkillSlot::kSubskill1));
  EXPECT_FALSE(m.skill(SkillSlot::kSubskill2));
  for (int i = 0; i < kNumLogits; ++i) {
    const bool subskill = i == kHeadOffsets[2] + static_cast<int>(SkillSlot::kSubskill1) ||
                          i == kHeadOffsets[2] + static_cast<int>(SkillSlot::kSubskill2);
    EXPECT_EQ(m.legal[i], !subskill) << i;
  }
}

TEST(Arena, StunLeavesOnlyNone) {
  GameState s = punch_range_state();
  s.fighters[0].stun_remaining = 5;
  const ActionMask m = legal_action_mask(s, Side::kA);
  for (int h = 0; h < kNumHeads; ++h) {
    for (int k = 0; k < kHeadSizes[h]; ++k) EXPECT_EQ(m.legal[kHeadOffsets[h] + k], k == 0) << h << "/" << k;
  }
}

TEST(Arena, NoOpStep) {
  GameState s = punch_range_state();
  const StepResult r = step(s, kNoAction, kNoAction);
  EXPECT_EQ(r.state.fighters[0].hp, s.fighters[0].hp);
  EXPECT_EQ(r.state.fighters[1].hp, s.fighters[1].hp);
  EXPECT_EQ(r.state.frame, s.frame + 1);
  EXPECT_EQ(r.info.outcome, Outcome::kOngoing);
  EXPECT_FALSE(r.info.terminal);
}

TEST(Arena, IllegalActionRejected) {
  GameState s = punch_range_state();
  s.fighters[0].cooldown_remaining[skill_index(SkillSlot::kPunch)] = 3;
  EXPECT_THROW(advance(s, skill(SkillSlot::kPunch), kNoAction), ContractViolation);
}

TEST(Arena, ClosedBoxesTouchingEdgesIntersect) {
  EXPECT_TRUE(intersects({0, 0, 1, 1}, {1, 0, 2, 1}));
  EXPECT_TRUE(intersects({0, 0, 1, 1}, {0.5, 1, 2, 3}));
  EXPECT_FALSE(intersects({0, 0, 1, 1}, {1.0000001, 0, 2, 1}));
}

TEST(Arena, PunchLandsWhenBoxesOverlap) {
  GameState s = punch_range_state();
  const SkillSpec& punch = s.spec(Side::kA).skill(SkillSlot::kPunch);
  // Oracle: punch hitbox against B's hurtbox, both computed from the spec.
  const Rect hit{5.0 + punch.hitbox.x - punch.hitbox.width / 2, 5.0 - punch.hitbox.height / 2,
                 5.0 + punch.hitbox.x + punch.hitbox.width / 2, 5.0 + punch.hitbox.height / 2};
  const Box& hb = s.spec(Side::kB).hurtbox;
  const Rect hurt{6.5 - hb.width / 2, 5.0 - hb.height / 2, 6.5 + hb.width / 2, 5.0 + hb.height / 2};
  ASSERT_TRUE(intersects(hit, hurt));
  const int hp0 = s.fighters[1].hp;
  advance(s, skill(SkillSlot::kPunch), kNoAction);
  for (int f = 1; f < punch.startup; ++f) {
    advance(s, kNoAction, kNoAction);
    EXPECT_EQ(s.fighters[1].hp, hp0);
  }
  const StepInfo info = advance(s, kNoAction, kNoAction);
  EXPECT_EQ(s.fighters[1].hp, hp0 - punch.damage);
  ASSERT_EQ(info.hits.size(), 1u);
  EXPECT_EQ(info.hits[0].result, HitResult::kHit);
}

TEST(Arena, PunchMissesOutOfRange) {
  GameState s = punch_range_state();
  s.fighters[1].pos = {9.0, 5.0};
  const int hp0 = s.fighters[1].hp;
  advance(s, skill(SkillSlot::kPunch), kNoAction);
  for (int f = 0; f < 8; ++f) advance(s, kNoAction, kNoAction);
  EXPECT_EQ(s.fighters[1].hp, hp0);
}

TEST(Arena, SubstituteNegatesAndStunsAttacker) {
  GameState s = punch_range_state();
  const int hp0 = s.fighters[1].hp;
  const double energy0 = s.fighters[1].energy;
  advance(s, skill(SkillSlot::kPunch), skill(SkillSlot::kSubstitute));
  StepInfo info;
  for (int f = 1; f <= s.spec(Side::kA).skill(SkillSlot::kPunch).startup; ++f) info = advance(s, kNoAction, kNoAction);
  EXPECT_EQ(s.fighters[1].hp, hp0);
  EXPECT_LT(s.fighters[1].energy, energy0);
  EXPECT_GT(s.fighters[0].stun_remaining, 0);
  EXPECT_EQ(s.fighters[0].stun_remaining, s.arena.counter_stun - 1);
  ASSERT_EQ(info.hits.size(), 1u);
  EXPECT_EQ(info.hits[0].result, HitResult::kNegated);
}

TEST(Arena, TimeoutGoesToHigherHpAndTieIsDraw) {
  const CharacterSpec c = template_character();
  GameState s = new_match(c, c, 2, 1);
  advance(s, kNoAction, kNoAction);
  advance(s, kNoAction, kNoAction);
  EXPECT_EQ(outcome_of(s), Outcome::kDraw);
  s.fighters[1].hp -= 1;
  EXPECT_EQ(outcome_of(s), Outcome::kAWins);
  s.fighters[0].hp = 0;
  s.fighters[1].hp = 0;
  EXPECT_EQ(outcome_of(s), Outcome::kDraw);
}

TEST(Arena, RandomRolloutInvariants) {
  const auto pool = generate_pool(3, 11);
  Rng rng(5);
  for (int m = 0; m < 20; ++m) {
    const CharacterSpec& a = pool[pick(rng, pool.size())];
    const CharacterSpec& b = pool[pick(rng, pool.size())];
    GameState s = new_match(a, b, 400, 100 + m);
    GameState replay = s;
    std::vector<std::pair<ActionTriple, ActionTriple>> actions;
    int frames = 0;
    while (!s.terminal()) {
      const ActionTriple xa = random_legal(s, Side::kA, rng);
      const ActionTriple xb = random_legal(s, Side::kB, rng);
      actions.emplace_back(xa, xb);
      const std::array<int, 2> before{s.fighters[0].hp, s.fighters[1].hp};
      const StepInfo info = advance(s, xa, xb);
      EXPECT_LE(s.fighters[0].hp, before[0]);
      EXPECT_LE(s.fighters[1].hp, before[1]);
      const std::array<int, 2> max_hp{a.max_hp, b.max_hp};
      const double ra = base_reward(info.hp.before, info.hp.after, max_hp, info.terminal);
      const double rb = base_reward({info.hp.before[1], info.hp.before[0]}, {info.hp.after[1], info.hp.after[0]},
                                    {max_hp[1], max_hp[0]}, info.terminal);
      EXPECT_EQ(ra, -rb);
      ASSERT_LE(++frames, 400);
    }
    for (const auto& [xa, xb] : actions) advance(replay, xa, xb);
    EXPECT_EQ(replay, s);
  }
}

TEST(Pool, GeneratedPoolShape) {
  const auto pool = generate_pool(3, 7);
  ASSERT_EQ(pool.size(), 12u);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    EXPECT_EQ(pool[i].char_id, static_cast<int>(i) + 1);
    EXPECT_EQ(static_cast<int>(pool[i].level), static_cast<int>(i) / 3);
    EXPECT_NO_THROW(validate(pool[i]));
  }
  EXPECT_GT(pool[0].max_hp, pool[11].max_hp);
}

TEST(Pool, JsonRoundTrip) {
  const auto pool = generate_pool(2, 3);
  EXPECT_EQ(pool_from_json(pool_to_json(pool)), pool);
}

TEST(Pool, InvalidSpecNamed) {
  CharacterSpec c = template_character();
  c.skills[skill_index(SkillSlot::kPunch)].damage = -1;
  try {
    validate(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("damage"), std::string::npos);
  }
}

TEST(Reward, BaseRewardExamples) {
  EXPECT_NEAR(base_reward({100, 100}, {90, 70}, {100, 100}, false), 0.20, 1e-15);
  EXPECT_NEAR(base_reward({100, 100}, {90, 70}, {100, 100}, true), 1.40, 1e-15);
  EXPECT_EQ(base_reward({100, 100}, {100, 100}, {100, 100}, false), 0.0);
}

TEST(Reward, StyleExamples) {
  const StyleReward balanced = StyleReward::preset(Style::kBalanced);
  const StyleReward cautious = StyleReward::preset(Style::kCautious);
  const StyleReward aggressive = StyleReward::preset(Style::kAggressive);
  for (bool terminal : {false, true}) {
    EXPECT_EQ(style_reward({100, 100}, {90, 70}, {100, 100}, terminal, balanced),
              base_reward({100, 100}, {90, 70}, {100, 100}, terminal));
  }
  const double idle = style_reward({100, 100}, {100, 100}, {100, 100}, false, aggressive);
  EXPECT_EQ(idle, aggressive.time_penalty);
  EXPECT_LT(idle, 0.0);
  EXPECT_LT(style_reward({100, 100}, {90, 90}, {100, 100}, false, cautious),
            style_reward({100, 100}, {90, 90}, {100, 100}, false, aggressive));
}

TEST(Reward, StyleValidation) {
  StyleReward s;
  s.time_penalty = 0.1;
  EXPECT_THROW(validate(s), ConfigError);
  EXPECT_EQ(style_from_string("cautious"), Style::kCautious);
  EXPECT_THROW(style_from_string("reckless"), ConfigError);
}
