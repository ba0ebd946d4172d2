#include "helt/encoders/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "helt/core/error.hpp"
#include "helt/game/arena.hpp"
#include "json.hpp"

namespace helt::enc {
namespace {

using game::FighterState;
using game::GameState;
using game::Side;
using game::SkillKind;
using game::SkillSlot;

constexpr std::array<std::string_view, 3> kModeNames{"FIS", "QS", "FQS"};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
double clamp11(double v) { return std::clamp(v, -1.0, 1.0); }
double frac(double num, double den) { return den > 0.0 ? clamp01(num / den) : 0.0; }

void push_core(std::vector<double>& out, const GameState& s, Side side) {
  const FighterState& f = s.fighter(side);
  const game::CharacterSpec& spec = s.spec(side);
  out.push_back(frac(f.hp, spec.max_hp));
  out.push_back(frac(f.energy, spec.max_energy));
  for (int i = 0; i < game::kNumSkills; ++i) out.push_back(frac(f.cooldown_remaining[i], spec.skills[i].cooldown));
  out.push_back(clamp01(f.pos.x / s.arena.width));
  out.push_back(clamp01(f.pos.y / s.arena.height));
  out.push_back(frac(f.stun_remaining, s.arena.max_stun));
  if (f.active_skill) {
    const game::SkillSpec& a = spec.skill(f.active_skill->slot);
    const int e = f.active_skill->frames_elapsed;
    out.push_back(1.0);
    out.push_back(a.startup > 0 ? frac(e, a.startup) : 1.0);
    out.push_back(e >= a.startup && e < a.startup + a.active ? 1.0 : 0.0);
  } else {
    out.insert(out.end(), {0.0, 0.0, 0.0});
  }
  out.push_back(frac(f.substitute_remaining, spec.skill(SkillSlot::kSubstitute).active));
  out.push_back(frac(f.buff_remaining, spec.skill(SkillSlot::kSummon).buff_frames));
  out.push_back(frac(f.combo_remaining, s.arena.combo_window));
  out.push_back(f.facing == game::Facing::kRight ? 1.0 : -1.0);
  out.push_back(clamp01(spec.max_hp / 200.0));
  out.push_back(clamp01(spec.move_speed / 0.5));
  for (const game::SkillSpec& k : spec.skills) {
    out.push_back(clamp01(k.damage / 50.0));
    out.push_back(clamp01(k.reach() / s.arena.width));
    out.push_back(clamp01(k.startup / 30.0));
    out.push_back(frac(k.energy_cost, spec.max_energy));
  }
}

void push_opp_extras(std::vector<double>& out, const GameState& s, Side side) {
  const FighterState& f = s.fighter(side);
  const game::CharacterSpec& spec = s.spec(side);
  const double aw = s.arena.width, ah = s.arena.height;
  if (f.active_skill && spec.skill(f.active_skill->slot).kind == SkillKind::kMelee) {
    const game::SkillSpec& a = spec.skill(f.active_skill->slot);
    const game::Rect r = game::hitbox_rect(s, side, f.active_skill->slot, f.active_skill->direction);
    out.push_back(clamp01((r.x1 - r.x0) / aw));
    out.push_back(clamp01((r.y1 - r.y0) / ah));
    out.push_back(clamp11(((r.x0 + r.x1) / 2 - f.pos.x) / aw));
    out.push_back(clamp11(((r.y0 + r.y1) / 2 - f.pos.y) / ah));
    out.push_back(frac(a.startup + a.active - f.active_skill->frames_elapsed, 30.0));
  } else {
    out.insert(out.end(), {0.0, 0.0, 0.0, 0.0});
    out.push_back(0.0);
  }
  out.push_back(clamp01(spec.hurtbox.width / aw));
  out.push_back(clamp01(spec.hurtbox.height / ah));
}

double towards(const GameState& s, Side side) {
  const double dx = s.fighter(game::other(side)).pos.x - s.fighter(side).pos.x;
  const double sign = s.fighter(side).facing == game::Facing::kRight ? 1.0 : -1.0;
  return dx * sign >= 0.0 ? 1.0 : -1.0;
}

void push_env(std::vector<double>& out, const GameState& s, Side self) {
  const Side opp = game::other(self);
  const FighterState& me = s.fighter(self);
  const FighterState& op = s.fighter(opp);
  const double aw = s.arena.width, ah = s.arena.height;
  const double dx = op.pos.x - me.pos.x, dy = op.pos.y - me.pos.y;
  out.push_back(clamp11(dx / aw));
  out.push_back(clamp11(dy / ah));
  out.push_back(clamp01(std::hypot(dx, dy) / std::hypot(aw, ah)));
  out.push_back(towards(s, self));
  out.push_back(towards(s, opp));
  out.push_back(clamp11(static_cast<double>(me.hp) / s.spec(self).max_hp -
                        static_cast<double>(op.hp) / s.spec(opp).max_hp));
  out.push_back(frac(s.horizon - s.frame, s.horizon));
  for (Side side : {self, opp}) {
    for (int i = 0; i < game::kNumSkills; ++i) out.push_back(game::in_range(s, side, game::slot_of(i)) ? 1.0 : 0.0);
  }
  const game::Projectile* nearest = nullptr;
  double best = 0.0;
  bool own = false;
  for (const game::Projectile& p : s.projectiles) {
    if (p.owner == self) {
      own = true;
      continue;
    }
    const double d = std::hypot(p.pos.x - me.pos.x, p.pos.y - me.pos.y);
    if (!nearest || d < best) {
      nearest = &p;
      best = d;
    }
  }
  if (nearest) {
    out.push_back(1.0);
    out.push_back(clamp11((nearest->pos.x - me.pos.x) / aw));
    out.push_back(clamp11((nearest->pos.y - me.pos.y) / ah));
  } else {
    out.insert(out.end(), {0.0, 0.0, 0.0});
  }
  out.push_back(own ? 1.0 : 0.0);
}

IdPair ids_for(const GameState& s, Side side, const IdTable& ids) {
  const int char_id = s.spec(side).char_id;
  const auto& active = s.fighter(side).active_skill;
  return IdPair{ids.char_index(char_id), ids.skill_index(char_id, active ? active->slot : SkillSlot::kNone)};
}

std::vector<FeatureField> build_schema() {
  std::vector<FeatureField> f;
  auto core = [&f](const std::string& block) {
    f.push_back({block, "hp", 0, 1});
    f.push_back({block, "energy", 0, 1});
    for (int i = 0; i < game::kNumSkills; ++i) {
      f.push_back({block, "cooldown_" + std::string(game::to_string(game::slot_of(i))), 0, 1});
    }
    f.push_back({block, "pos_x", 0, 1});
    f.push_back({block, "pos_y", 0, 1});
    f.push_back({block, "stun", 0, 1});
    f.push_back({block, "busy", 0, 1});
    f.push_back({block, "startup_progress", 0, 1});
    f.push_back({block, "in_active_frames", 0, 1});
    f.push_back({block, "substitute_window", 0, 1});
    f.push_back({block, "buff", 0, 1});
    f.push_back({block, "combo_window", 0, 1});
    f.push_back({block, "facing", -1, 1});
    f.push_back({block, "max_hp", 0, 1});
    f.push_back({block, "move_speed", 0, 1});
    for (int i = 0; i < game::kNumSkills; ++i) {
      const std::string n(game::to_string(game::slot_of(i)));
      f.push_back({block, n + "_damage", 0, 1});
      f.push_back({block, n + "_reach", 0, 1});
      f.push_back({block, n + "_startup", 0, 1});
      f.push_back({block, n + "_energy_cost", 0, 1});
    }
  };
  core("self_attr");
  core("opp_attr");
  f.push_back({"opp_attr", "hitbox_width", 0, 1});
  f.push_back({"opp_attr", "hitbox_height", 0, 1});
  f.push_back({"opp_attr", "hitbox_dx", -1, 1});
  f.push_back({"opp_attr", "hitbox_dy", -1, 1});
  f.push_back({"opp_attr", "remaining_active", 0, 1});
  f.push_back({"opp_attr", "hurtbox_width", 0, 1});
  f.push_back({"opp_attr", "hurtbox_height", 0, 1});
  f.push_back({"env", "rel_x", -1, 1});
  f.push_back({"env", "rel_y", -1, 1});
  f.push_back({"env", "distance", 0, 1});
  f.push_back({"env", "self_faces_opp", -1, 1});
  f.push_back({"env", "opp_faces_self", -1, 1});
  f.push_back({"env", "hp_diff", -1, 1});
  f.push_back({"env", "time_remaining", 0, 1});
  for (const char* who : {"self", "opp"}) {
    for (int i = 0; i < game::kNumSkills; ++i) {
      f.push_back({"env", std::string(who) + "_in_range_" + std::string(game::to_string(game::slot_of(i))), 0, 1});
    }
  }
  f.push_back({"env", "enemy_projectile", 0, 1});
  f.push_back({"env", "enemy_projectile_dx", -1, 1});
  f.push_back({"env", "enemy_projectile_dy", -1, 1});
  f.push_back({"env", "own_projectile", 0, 1});
  return f;
}

}  // namespace

std::string_view to_string(EncoderMode mode) { return kModeNames[static_cast<int>(mode)]; }

EncoderMode mode_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kModeNames.size(); ++i) {
    if (kModeNames[i] == text) return static_cast<EncoderMode>(i);
  }
  throw ConfigError("unknown encoder mode '" + std::string(text) + "'");
}

IdTable::IdTable(const std::vector<int>& char_ids) : ids_(char_ids) {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], static_cast<int>(i) + 1).second) {
      throw ConfigError("id table: duplicate char_id " + std::to_string(ids_[i]));
    }
  }
}

int IdTable::char_index(int char_id) const {
  const auto it = index_.find(char_id);
  return it == index_.end() ? 0 : it->second;
}

int IdTable::skill_index(int char_id, game::SkillSlot slot) const {
  return char_index(char_id) * game::kNumSkillSlots + static_cast<int>(slot);
}

std::vector<double> Observation::numeric() const {
  std::vector<double> out(numeric_size());
  numeric_into(out.data());
  return out;
}

void Observation::numeric_into(double* out) const {
  out = std::copy(self_attr.begin(), self_attr.end(), out);
  out = std::copy(opp_attr.begin(), opp_attr.end(), out);
  std::copy(env.begin(), env.end(), out);
}

std::vector<int> Observation::id_indices() const {
  std::vector<int> out;
  if (self_id) out.insert(out.end(), {self_id->character, self_id->skill});
  if (opp_id) out.insert(out.end(), {opp_id->character, opp_id->skill});
  return out;
}

int num_id_slots(EncoderMode mode) {
  switch (mode) {
    case EncoderMode::kFIS: return 4;
    case EncoderMode::kQS: return 2;
    case EncoderMode::kFQS: return 0;
  }
  return 0;
}

Observation encode(const GameState& state, Side player, EncoderMode mode, const IdTable& ids) {
  Observation obs;
  const Side opp = game::other(player);
  obs.self_attr.reserve(kSelfAttrDim);
  obs.opp_attr.reserve(kOppAttrDim);
  obs.env.reserve(kEnvDim);
  push_core(obs.self_attr, state, player);
  push_core(obs.opp_attr, state, opp);
  push_opp_extras(obs.opp_attr, state, opp);
  push_env(obs.env, state, player);
  if (mode != EncoderMode::kFQS) obs.self_id = ids_for(state, player, ids);
  if (mode == EncoderMode::kFIS) obs.opp_id = ids_for(state, opp, ids);
  return obs;
}

int feature_dim(EncoderMode mode, int char_table_size, int skill_table_size, const EncoderConfig& cfg) {
  if (char_table_size <= 0 || skill_table_size <= 0) throw ContractViolation("feature_dim: table sizes must be > 0");
  return kNumericDim + num_id_slots(mode) * cfg.embedding_width;
}

const std::vector<FeatureField>& numeric_schema() {
  static const std::vector<FeatureField> schema = build_schema();
  return schema;
}

std::string schema_json(EncoderMode mode, const IdTable& ids, const EncoderConfig& cfg) {
  nlohmann::json fields = nlohmann::json::array();
  int offset = 0;
  for (const FeatureField& f : numeric_schema()) {
    fields.push_back({{"index", offset++}, {"block", f.block}, {"name", f.name}, {"lo", f.lo}, {"hi", f.hi}});
  }
  nlohmann::json id_slots = nlohmann::json::array();
  const std::array<std::string_view, 4> names{"self_char", "self_skill", "opp_char", "opp_skill"};
  for (int i = 0; i < num_id_slots(mode); ++i) {
    id_slots.push_back({{"name", names[i]},
                        {"table", i % 2 == 0 ? "character" : "skill"},
                        {"table_size", i % 2 == 0 ? ids.char_table_size() : ids.skill_table_size()},
                        {"width", cfg.embedding_width}});
  }
  nlohmann::json doc{{"schema_version", kSchemaVersion},
                     {"mode", to_string(mode)},
                     {"feature_dim", feature_dim(mode, ids.char_table_size(), ids.skill_table_size(), cfg)},
                     {"id_slots", id_slots},
                     {"numeric", fields}};
  return doc.dump(2);
}

}  // namespace helt::enc
