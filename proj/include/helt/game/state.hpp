#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "helt/game/character.hpp"

namespace helt::game {

enum class Side : std::uint8_t { kA = 0, kB = 1 };
inline constexpr int idx(Side s) { return static_cast<int>(s); }
inline constexpr Side other(Side s) { return s == Side::kA ? Side::kB : Side::kA; }

enum class Facing : std::uint8_t { kLeft, kRight };

enum class MoveUD : std::uint8_t { kNone, kUp, kDown };
enum class MoveLR : std::uint8_t { kNone, kLeft, kRight };

inline constexpr int kNumDirections = 8;

// One joint action across the four heads. `direction` d points at angle
// d * 45 degrees counter-clockwise from +x.
struct ActionTriple {
  MoveUD ud = MoveUD::kNone;
  MoveLR lr = MoveLR::kNone;
  SkillSlot skill = SkillSlot::kNone;
  std::uint8_t direction = 0;

  friend bool operator==(const ActionTriple&, const ActionTriple&) = default;
};

inline constexpr ActionTriple kNoAction{};

// Layout of the concatenated action heads: ud(3) lr(3) skill(10) dir(8).
inline constexpr std::array<int, 4> kHeadSizes{3, 3, 10, 8};
inline constexpr std::array<int, 4> kHeadOffsets{0, 3, 6, 16};
inline constexpr int kNumLogits = 24;
inline constexpr int kNumHeads = 4;

struct ActionMask {
  std::array<bool, kNumLogits> legal{};

  bool ud(MoveUD v) const { return legal[kHeadOffsets[0] + static_cast<int>(v)]; }
  bool lr(MoveLR v) const { return legal[kHeadOffsets[1] + static_cast<int>(v)]; }
  bool skill(SkillSlot v) const { return legal[kHeadOffsets[2] + static_cast<int>(v)]; }
  bool direction(int d) const { return legal[kHeadOffsets[3] + d]; }
  bool allows(const ActionTriple& a) const {
    return ud(a.ud) && lr(a.lr) && skill(a.skill) && a.direction < kNumDirections &&
           direction(a.direction);
  }
};

// Head index entries of an action, in logit order.
std::array<int, kNumHeads> head_choices(const ActionTriple& a);
ActionTriple from_head_choices(const std::array<int, kNumHeads>& choices);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct ActiveSkill {
  SkillSlot slot = SkillSlot::kNone;
  int frames_elapsed = 0;
  std::uint8_t direction = 0;
  bool has_hit = false;
  friend bool operator==(const ActiveSkill&, const ActiveSkill&) = default;
};

struct FighterState {
  int hp = 0;
  Vec2 pos;
  double energy = 0.0;
  std::array<int, kNumSkills> cooldown_remaining{};
  int stun_remaining = 0;
  std::optional<ActiveSkill> active_skill;
  Facing facing = Facing::kRight;
  int substitute_remaining = 0;  // frames the raised substitute still protects
  int buff_remaining = 0;        // summon damage buff
  SkillSlot combo_parent = SkillSlot::kNone;
  int combo_remaining = 0;       // follow-up window opened by a landed skill1/skill2

  friend bool operator==(const FighterState&, const FighterState&) = default;
};

struct Projectile {
  Side owner = Side::kA;
  Vec2 pos;
  Vec2 velocity;
  int frames_remaining = 0;
  int damage = 0;
  int hitstun = 0;
  double width = 0.0;
  double height = 0.0;
  friend bool operator==(const Projectile&, const Projectile&) = default;
};

struct ArenaConfig {
  double width = 20.0;
  double height = 10.0;
  double spawn_x = 5.0;        // side A spawns at x, side B at width - x
  double spawn_y_jitter = 1.0;  // symmetric vertical jitter drawn from the seed
  int counter_stun = 30;       // attacker stun after a negated hit
  int combo_window = 20;
  double buff_multiplier = 1.5;
  int max_stun = 30;           // stun normalizer for observations

  friend bool operator==(const ArenaConfig&, const ArenaConfig&) = default;
};

struct GameState {
  int frame = 0;
  int horizon = 0;
  std::array<FighterState, 2> fighters{};
  std::array<CharacterSpec, 2> specs{};
  std::vector<Projectile> projectiles;
  ArenaConfig arena;
  std::minstd_rand rng_stream;

  const FighterState& fighter(Side s) const { return fighters[idx(s)]; }
  FighterState& fighter(Side s) { return fighters[idx(s)]; }
  const CharacterSpec& spec(Side s) const { return specs[idx(s)]; }

  bool terminal() const {
    return fighters[0].hp == 0 || fighters[1].hp == 0 || frame >= horizon;
  }

  friend bool operator==(const GameState&, const GameState&) = default;
};

enum class Outcome : std::uint8_t { kOngoing, kAWins, kBWins, kDraw };

enum class HitResult : std::uint8_t { kHit, kNegated };

struct HitEvent {
  Side attacker = Side::kA;
  SkillSlot slot = SkillSlot::kNone;
  HitResult result = HitResult::kHit;
  int damage = 0;
};

struct SkillStart {
  Side side = Side::kA;
  SkillSlot slot = SkillSlot::kNone;
};

struct HpDelta {
  std::array<int, 2> before{};
  std::array<int, 2> after{};
};

struct StepInfo {
  HpDelta hp;
  bool terminal = false;
  Outcome outcome = Outcome::kOngoing;
  std::vector<SkillStart> starts;
  std::vector<HitEvent> hits;
};

struct StepResult {
  GameState state;
  StepInfo info;
};

}  // namespace helt::game
