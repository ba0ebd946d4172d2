#include "helt/game/character.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "helt/core/error.hpp"
#include "json.hpp"

namespace helt::game {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 4> kLevelNames{"S", "A", "B", "C"};
constexpr std::array<std::string_view, kNumSkillSlots> kSlotNames{
    "none",       "punch",  "skill1", "skill2",    "skill3",
    "substitute", "summon", "scroll", "subskill1", "subskill2"};
constexpr std::array<std::string_view, 4> kKindNames{"melee", "projectile", "buff", "defensive"};

SkillKind expected_kind(SkillSlot slot) {
  switch (slot) {
    case SkillSlot::kSubstitute: return SkillKind::kDefensive;
    case SkillSlot::kSummon: return SkillKind::kBuff;
    case SkillSlot::kScroll: return SkillKind::kProjectile;
    default: return SkillKind::kMelee;
  }
}

SkillKind kind_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == text) return static_cast<SkillKind>(i);
  }
  throw ConfigError("unknown skill kind '" + std::string(text) + "'");
}

struct LevelScale {
  int max_hp;
  double damage;
};

LevelScale scale_for(Level level) {
  switch (level) {
    case Level::kS: return {130, 1.2};
    case Level::kA: return {120, 1.1};
    case Level::kB: return {110, 1.0};
    case Level::kC: return {100, 0.9};
  }
  return {100, 1.0};
}

json box_to_json(const Box& b) { return json{{"x", b.x}, {"y", b.y}, {"w", b.width}, {"h", b.height}}; }

Box box_from_json(const json& j) {
  return Box{j.at("x").get<double>(), j.at("y").get<double>(), j.at("w").get<double>(),
             j.at("h").get<double>()};
}

json skill_to_json(const SkillSpec& s, SkillSlot slot) {
  return json{{"slot", kSlotNames[static_cast<int>(slot)]},
              {"skill_id", s.skill_id},
              {"kind", kKindNames[static_cast<int>(s.kind)]},
              {"damage", s.damage},
              {"cooldown", s.cooldown},
              {"startup", s.startup},
              {"active", s.active},
              {"hitbox", box_to_json(s.hitbox)},
              {"energy_cost", s.energy_cost},
              {"needs_direction", s.needs_direction},
              {"is_defensive", s.is_defensive},
              {"hitstun", s.hitstun},
              {"projectile_speed", s.projectile_speed},
              {"buff_frames", s.buff_frames}};
}

SkillSpec skill_from_json(const json& j) {
  SkillSpec s;
  s.skill_id = j.at("skill_id").get<int>();
  s.kind = kind_from_string(j.at("kind").get<std::string>());
  s.damage = j.at("damage").get<int>();
  s.cooldown = j.at("cooldown").get<int>();
  s.startup = j.at("startup").get<int>();
  s.active = j.at("active").get<int>();
  s.hitbox = box_from_json(j.at("hitbox"));
  s.energy_cost = j.value("energy_cost", 0.0);
  s.needs_direction = j.value("needs_direction", false);
  s.is_defensive = j.value("is_defensive", false);
  s.hitstun = j.value("hitstun", 0);
  s.projectile_speed = j.value("projectile_speed", 0.0);
  s.buff_frames = j.value("buff_frames", 0);
  return s;
}

}  // namespace

std::string_view to_string(Level level) { return kLevelNames[static_cast<int>(level)]; }

Level level_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kLevelNames.size(); ++i) {
    if (kLevelNames[i] == text) return static_cast<Level>(i);
  }
  throw ConfigError("unknown character level '" + std::string(text) + "'");
}

std::string_view to_string(SkillSlot slot) { return kSlotNames[static_cast<int>(slot)]; }

int SkillSpec::busy_frames() const {
  switch (kind) {
    case SkillKind::kMelee: return startup + active;
    case SkillKind::kProjectile: return startup + 2;
    case SkillKind::kBuff: return startup + active;
    case SkillKind::kDefensive: return 0;
  }
  return 0;
}

double SkillSpec::reach() const {
  switch (kind) {
    case SkillKind::kMelee:
      return std::hypot(std::abs(hitbox.x) + hitbox.width / 2, std::abs(hitbox.y) + hitbox.height / 2);
    case SkillKind::kProjectile:
      return std::abs(hitbox.x) + projectile_speed * active + hitbox.width / 2;
    default: return 0.0;
  }
}

void validate(const CharacterSpec& spec) {
  auto fail = [&](const std::string& what) {
    throw ConfigError("character " + std::to_string(spec.char_id) + ": " + what);
  };
  if (spec.max_hp <= 0) fail("max_hp must be > 0");
  if (!(spec.move_speed > 0.0)) fail("move_speed must be > 0");
  if (!(spec.hurtbox.width > 0.0) || !(spec.hurtbox.height > 0.0)) fail("hurtbox extent must be > 0");
  if (!(spec.max_energy > 0.0)) fail("max_energy must be > 0");
  if (spec.energy_regen < 0.0) fail("energy_regen must be >= 0");
  for (int i = 0; i < kNumSkills; ++i) {
    const SkillSpec& s = spec.skills[i];
    const SkillSlot slot = slot_of(i);
    const std::string name(to_string(slot));
    if (s.kind != expected_kind(slot)) fail(name + ": wrong skill kind for slot");
    if (s.is_defensive != (slot == SkillSlot::kSubstitute)) fail(name + ": is_defensive only on substitute");
    if (s.damage < 0) fail(name + ": damage must be >= 0");
    if (s.startup < 0) fail(name + ": startup must be >= 0");
    if (s.cooldown < s.startup) fail(name + ": cooldown must be >= startup");
    if (s.active < 0) fail(name + ": active must be >= 0");
    if (s.energy_cost < 0.0) fail(name + ": energy_cost must be >= 0");
    if (s.hitstun < 0 || s.buff_frames < 0) fail(name + ": negative frame count");
    if (s.kind == SkillKind::kProjectile && !(s.projectile_speed > 0.0)) fail(name + ": projectile_speed must be > 0");
    if ((s.kind == SkillKind::kMelee || s.kind == SkillKind::kProjectile) &&
        (!(s.hitbox.width > 0.0) || !(s.hitbox.height > 0.0))) {
      fail(name + ": hitbox extent must be > 0");
    }
  }
}

CharacterSpec template_character() {
  CharacterSpec c;
  c.name = "template";
  c.level = Level::kB;
  c.max_hp = 110;
  c.move_speed = 0.22;
  c.hurtbox = Box{0.0, 0.0, 0.8, 1.6};
  c.max_energy = 100.0;
  c.energy_regen = 0.15;
  auto& k = c.skills;
  //                 id kind                 dmg  cd   su act  hitbox                    cost  dir    def    stun speed buff
  k[skill_index(SkillSlot::kPunch)] = {0, SkillKind::kMelee, 4, 12, 3, 3, {0.9, 0.0, 1.0, 1.2}, 0.0, false, false, 10, 0.0, 0};
  k[skill_index(SkillSlot::kSkill1)] = {0, SkillKind::kMelee, 11, 150, 6, 5, {1.4, 0.0, 1.8, 1.8}, 0.0, false, false, 14, 0.0, 0};
  k[skill_index(SkillSlot::kSkill2)] = {0, SkillKind::kMelee, 13, 180, 8, 6, {2.2, 0.0, 1.6, 1.6}, 0.0, true, false, 14, 0.0, 0};
  k[skill_index(SkillSlot::kSkill3)] = {0, SkillKind::kMelee, 24, 450, 12, 8, {1.8, 0.0, 3.2, 3.0}, 40.0, false, false, 20, 0.0, 0};
  k[skill_index(SkillSlot::kSubstitute)] = {0, SkillKind::kDefensive, 0, 90, 0, 10, {}, 35.0, false, true, 0, 0.0, 0};
  k[skill_index(SkillSlot::kSummon)] = {0, SkillKind::kBuff, 0, 600, 10, 1, {}, 0.0, false, false, 0, 0.0, 150};
  k[skill_index(SkillSlot::kScroll)] = {0, SkillKind::kProjectile, 8, 240, 5, 45, {0.8, 0.0, 0.8, 0.8}, 0.0, true, false, 12, 0.35, 0};
  k[skill_index(SkillSlot::kSubskill1)] = {0, SkillKind::kMelee, 7, 30, 2, 4, {1.3, 0.0, 1.4, 1.4}, 0.0, false, false, 12, 0.0, 0};
  k[skill_index(SkillSlot::kSubskill2)] = {0, SkillKind::kMelee, 8, 30, 3, 4, {1.6, 0.0, 1.6, 1.6}, 0.0, false, false, 12, 0.0, 0};
  return c;
}

std::vector<CharacterSpec> generate_pool(int per_level, std::uint64_t seed) {
  if (per_level <= 0) throw ConfigError("pool generator: per_level must be > 0");
  Rng rng(seed);
  auto jitter = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::vector<CharacterSpec> pool;
  int next_id = 1;
  for (Level level : {Level::kS, Level::kA, Level::kB, Level::kC}) {
    const LevelScale scale = scale_for(level);
    for (int n = 0; n < per_level; ++n) {
      CharacterSpec c = template_character();
      c.char_id = next_id++;
      c.level = level;
      c.name = std::string(to_string(level)) + "-" + std::to_string(n + 1);
      c.max_hp = scale.max_hp + static_cast<int>(std::lround(jitter(-6.0, 6.0)));
      c.move_speed = 0.22 * jitter(0.85, 1.15);
      c.hurtbox.width *= jitter(0.9, 1.15);
      c.hurtbox.height *= jitter(0.9, 1.15);
      c.energy_regen *= jitter(0.85, 1.15);
      for (int i = 0; i < kNumSkills; ++i) {
        SkillSpec& s = c.skills[i];
        s.skill_id = c.char_id * kNumSkillSlots + i + 1;
        s.damage = static_cast<int>(std::lround(s.damage * scale.damage * jitter(0.85, 1.2)));
        const double reach_scale = jitter(0.8, 1.25);
        s.hitbox.x *= reach_scale;
        s.hitbox.width *= jitter(0.85, 1.2);
        if (s.kind != SkillKind::kDefensive && s.startup > 1) {
          s.startup = std::max(1, s.startup + static_cast<int>(std::lround(jitter(-1.5, 1.5))));
        }
        if (s.kind == SkillKind::kMelee || s.kind == SkillKind::kProjectile) {
          s.cooldown = std::max(s.startup, static_cast<int>(std::lround(s.cooldown * jitter(0.85, 1.15))));
        }
        if (s.kind == SkillKind::kProjectile) s.projectile_speed *= jitter(0.85, 1.2);
      }
      validate(c);
      pool.push_back(std::move(c));
    }
  }
  return pool;
}

std::string pool_to_json(const std::vector<CharacterSpec>& pool) {
  json chars = json::array();
  for (const CharacterSpec& c : pool) {
    json skills = json::array();
    for (int i = 0; i < kNumSkills; ++i) skills.push_back(skill_to_json(c.skills[i], slot_of(i)));
    chars.push_back(json{{"char_id", c.char_id},
                         {"name", c.name},
                         {"level", to_string(c.level)},
                         {"max_hp", c.max_hp},
                         {"move_speed", c.move_speed},
                         {"hurtbox", box_to_json(c.hurtbox)},
                         {"max_energy", c.max_energy},
                         {"energy_regen", c.energy_regen},
                         {"skills", skills}});
  }
  return json{{"version", 1}, {"characters", chars}}.dump(2);
}

std::vector<CharacterSpec> pool_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("character pool: ") + e.what());
  }
  std::vector<CharacterSpec> pool;
  try {
    if (doc.value("version", 1) != 1) throw ConfigError("character pool: unsupported version");
    for (const json& jc : doc.at("characters")) {
      CharacterSpec c;
      c.char_id = jc.at("char_id").get<int>();
      c.name = jc.value("name", "char-" + std::to_string(c.char_id));
      c.level = level_from_string(jc.at("level").get<std::string>());
      c.max_hp = jc.at("max_hp").get<int>();
      c.move_speed = jc.at("move_speed").get<double>();
      c.hurtbox = box_from_json(jc.at("hurtbox"));
      c.max_energy = jc.at("max_energy").get<double>();
      c.energy_regen = jc.at("energy_regen").get<double>();
      const json& skills = jc.at("skills");
      if (!skills.is_array() || skills.size() != static_cast<std::size_t>(kNumSkills)) {
        throw ConfigError("character " + std::to_string(c.char_id) + ": skills must list exactly 9 entries");
      }
      for (int i = 0; i < kNumSkills; ++i) {
        const json& js = skills[i];
        if (js.contains("slot") && js.at("slot").get<std::string>() != to_string(slot_of(i))) {
          throw ConfigError("character " + std::to_string(c.char_id) + ": skill " + std::to_string(i) +
                            " must be '" + std::string(to_string(slot_of(i))) + "'");
        }
        c.skills[i] = skill_from_json(js);
      }
      validate(c);
      pool.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("character pool: ") + e.what());
  }
  std::vector<int> ids;
  for (const auto& c : pool) ids.push_back(c.char_id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw ConfigError("character pool: duplicate char_id");
  }
  return pool;
}

std::vector<CharacterSpec> load_pool(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("character pool: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return pool_from_json(ss.str());
}

}  // namespace helt::game
