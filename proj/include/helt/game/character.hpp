#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "helt/core/random.hpp"

namespace helt::game {

enum class Level : std::uint8_t { kS, kA, kB, kC };

std::string_view to_string(Level level);
Level level_from_string(std::string_view text);

// Slots of the skill action head. Index 0 is "none"; slots 1..9 map onto
// CharacterSpec::skills[slot - 1].
enum class SkillSlot : std::uint8_t {
  kNone = 0,
  kPunch,
  kSkill1,
  kSkill2,
  kSkill3,
  kSubstitute,
  kSummon,
  kScroll,
  kSubskill1,
  kSubskill2,
};

inline constexpr int kNumSkillSlots = 10;
inline constexpr int kNumSkills = kNumSkillSlots - 1;

inline constexpr int skill_index(SkillSlot slot) { return static_cast<int>(slot) - 1; }
inline constexpr SkillSlot slot_of(int skill_index) {
  return static_cast<SkillSlot>(skill_index + 1);
}
std::string_view to_string(SkillSlot slot);

enum class SkillKind : std::uint8_t { kMelee, kProjectile, kBuff, kDefensive };

// Axis-aligned rectangle in arena units. For hitboxes (x, y) is the offset
// of the box centre from the fighter when facing right; for hurtboxes only
// the extent is used.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const Box&, const Box&) = default;
};

struct SkillSpec {
  int skill_id = 0;
  SkillKind kind = SkillKind::kMelee;
  int damage = 0;
  int cooldown = 0;  // frames
  int startup = 0;   // frames before the hitbox (or effect) activates
  int active = 0;    // hitbox frames; projectile lifetime; substitute window
  Box hitbox;
  double energy_cost = 0.0;
  bool needs_direction = false;
  bool is_defensive = false;
  int hitstun = 0;                // frames the defender is stunned on a landed hit
  double projectile_speed = 0.0;  // units/frame, projectiles only
  int buff_frames = 0;            // summon buff duration

  // Frames the caster stays committed after starting the skill.
  int busy_frames() const;
  // Farthest distance from the caster's centre the skill can reach.
  double reach() const;

  friend bool operator==(const SkillSpec&, const SkillSpec&) = default;
};

struct CharacterSpec {
  int char_id = 0;
  std::string name;
  Level level = Level::kC;
  int max_hp = 100;
  double move_speed = 0.2;  // units/frame
  std::array<SkillSpec, kNumSkills> skills{};
  Box hurtbox{0.0, 0.0, 1.0, 2.0};
  double max_energy = 100.0;
  double energy_regen = 0.15;  // points/frame

  const SkillSpec& skill(SkillSlot slot) const { return skills[skill_index(slot)]; }

  friend bool operator==(const CharacterSpec&, const CharacterSpec&) = default;
};

// Throws ConfigError naming the first violated invariant.
void validate(const CharacterSpec& spec);

// Stat template shared by every synthetic character before level scaling
// and per-character jitter.
CharacterSpec template_character();

// Synthetic pool with level-correlated stats: `per_level` characters for
// each of S, A, B, C, ids assigned 1..n in that order.
std::vector<CharacterSpec> generate_pool(int per_level, std::uint64_t seed);

// Character pool file: JSON document {"version": 1, "characters": [...]}.
std::string pool_to_json(const std::vector<CharacterSpec>& pool);
std::vector<CharacterSpec> pool_from_json(std::string_view text);
std::vector<CharacterSpec> load_pool(const std::string& path);

}  // namespace helt::game
