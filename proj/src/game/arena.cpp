#include "helt/game/arena.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "helt/core/error.hpp"

namespace helt::game {
namespace {

double facing_sign(Facing f) { return f == Facing::kRight ? 1.0 : -1.0; }

Facing facing_towards(const GameState& s, Side side, Facing current) {
  const double dx = s.fighter(other(side)).pos.x - s.fighter(side).pos.x;
  if (dx > 1e-9) return Facing::kRight;
  if (dx < -1e-9) return Facing::kLeft;
  return current;
}

Rect centred(Vec2 c, double w, double h) { return Rect{c.x - w / 2, c.y - h / 2, c.x + w / 2, c.y + h / 2}; }

Rect melee_rect(const FighterState& f, const SkillSpec& s, int direction, Facing facing) {
  Vec2 c = f.pos;
  if (s.needs_direction) {
    const Vec2 u = direction_vector(direction);
    c.x += u.x * s.hitbox.x;
    c.y += u.y * s.hitbox.x + s.hitbox.y;
  } else {
    c.x += facing_sign(facing) * s.hitbox.x;
    c.y += s.hitbox.y;
  }
  return centred(c, s.hitbox.width, s.hitbox.height);
}

bool in_active_window(const SkillSpec& s, int elapsed) {
  return elapsed >= s.startup && elapsed < s.startup + s.active;
}

std::string describe(const ActionTriple& a) {
  return "ud=" + std::to_string(static_cast<int>(a.ud)) + " lr=" + std::to_string(static_cast<int>(a.lr)) +
         " skill=" + std::string(to_string(a.skill)) + " dir=" + std::to_string(static_cast<int>(a.direction));
}

void clear_combo(FighterState& f) {
  f.combo_parent = SkillSlot::kNone;
  f.combo_remaining = 0;
}

void start_skill(GameState& s, Side side, const ActionTriple& a, StepInfo& info) {
  FighterState& f = s.fighter(side);
  const SkillSpec& spec = s.spec(side).skill(a.skill);
  f.cooldown_remaining[skill_index(a.skill)] = spec.cooldown;
  f.energy -= spec.energy_cost;
  info.starts.push_back({side, a.skill});
  if (spec.kind == SkillKind::kDefensive) {
    f.substitute_remaining = spec.active;
    f.active_skill.reset();
    return;
  }
  if (a.skill == SkillSlot::kSubskill1 || a.skill == SkillSlot::kSubskill2) clear_combo(f);
  f.active_skill = ActiveSkill{a.skill, 0, a.direction, false};
}

void move(GameState& s, Side side, const ActionTriple& a) {
  FighterState& f = s.fighter(side);
  const CharacterSpec& spec = s.spec(side);
  if (f.active_skill || f.stun_remaining > 0) return;
  const double v = spec.move_speed;
  if (a.lr == MoveLR::kLeft) f.pos.x -= v;
  if (a.lr == MoveLR::kRight) f.pos.x += v;
  if (a.ud == MoveUD::kUp) f.pos.y += v;
  if (a.ud == MoveUD::kDown) f.pos.y -= v;
  const double hw = spec.hurtbox.width / 2, hh = spec.hurtbox.height / 2;
  f.pos.x = std::clamp(f.pos.x, hw, s.arena.width - hw);
  f.pos.y = std::clamp(f.pos.y, hh, s.arena.height - hh);
}

struct PendingHit {
  Side attacker;
  SkillSlot slot;
  int damage;
  int hitstun;
  int projectile = -1;
};

}  // namespace

std::array<int, kNumHeads> head_choices(const ActionTriple& a) {
  return {static_cast<int>(a.ud), static_cast<int>(a.lr), static_cast<int>(a.skill), static_cast<int>(a.direction)};
}

ActionTriple from_head_choices(const std::array<int, kNumHeads>& c) {
  return ActionTriple{static_cast<MoveUD>(c[0]), static_cast<MoveLR>(c[1]), static_cast<SkillSlot>(c[2]),
                      static_cast<std::uint8_t>(c[3])};
}

bool intersects(const Rect& a, const Rect& b) {
  return a.x0 <= b.x1 && b.x0 <= a.x1 && a.y0 <= b.y1 && b.y0 <= a.y1;
}

Vec2 direction_vector(int direction) {
  const double angle = direction * std::numbers::pi / 4.0;
  return Vec2{std::cos(angle), std::sin(angle)};
}

int nearest_direction(Vec2 delta) {
  if (delta.x == 0.0 && delta.y == 0.0) return 0;
  double angle = std::atan2(delta.y, delta.x);
  if (angle < 0) angle += 2 * std::numbers::pi;
  return static_cast<int>(std::lround(angle / (std::numbers::pi / 4.0))) % kNumDirections;
}

Rect hurtbox_rect(const GameState& state, Side side) {
  const FighterState& f = state.fighter(side);
  const Box& h = state.spec(side).hurtbox;
  return centred(Vec2{f.pos.x + facing_sign(f.facing) * h.x, f.pos.y + h.y}, h.width, h.height);
}

Rect hitbox_rect(const GameState& state, Side side, SkillSlot slot, int direction) {
  const FighterState& f = state.fighter(side);
  return melee_rect(f, state.spec(side).skill(slot), direction, f.facing);
}

bool in_range(const GameState& state, Side side, SkillSlot slot) {
  if (slot == SkillSlot::kNone) return false;
  const SkillSpec& s = state.spec(side).skill(slot);
  const FighterState& me = state.fighter(side);
  const FighterState& opp = state.fighter(other(side));
  const Vec2 delta{opp.pos.x - me.pos.x, opp.pos.y - me.pos.y};
  const int dir = nearest_direction(delta);
  const Rect target = hurtbox_rect(state, other(side));
  if (s.kind == SkillKind::kMelee) {
    return intersects(melee_rect(me, s, dir, facing_towards(state, side, me.facing)), target);
  }
  if (s.kind == SkillKind::kProjectile) {
    const Vec2 u = direction_vector(dir);
    const double along = delta.x * u.x + delta.y * u.y;
    const double across = std::abs(-delta.x * u.y + delta.y * u.x);
    const Box& hb = state.spec(other(side)).hurtbox;
    const double tolerance = (s.hitbox.height + std::min(hb.width, hb.height)) / 2;
    return along >= 0.0 && along <= s.reach() && across <= tolerance;
  }
  return false;
}

GameState new_match(const CharacterSpec& spec_a, const CharacterSpec& spec_b, int horizon,
                    std::uint64_t seed, const ArenaConfig& arena) {
  if (horizon <= 0) throw ContractViolation("new_match: horizon must be > 0");
  validate(spec_a);
  validate(spec_b);
  GameState s;
  s.horizon = horizon;
  s.arena = arena;
  s.specs = {spec_a, spec_b};
  s.rng_stream.seed(static_cast<std::minstd_rand::result_type>(seed % 2147483646ULL + 1));
  const double jitter =
      std::uniform_real_distribution<double>(-arena.spawn_y_jitter, arena.spawn_y_jitter)(s.rng_stream);
  for (Side side : {Side::kA, Side::kB}) {
    FighterState& f = s.fighter(side);
    const CharacterSpec& spec = s.spec(side);
    f.hp = spec.max_hp;
    f.energy = spec.max_energy;
    f.pos = Vec2{side == Side::kA ? arena.spawn_x : arena.width - arena.spawn_x, arena.height / 2 + jitter};
    f.facing = side == Side::kA ? Facing::kRight : Facing::kLeft;
  }
  return s;
}

ActionMask legal_action_mask(const GameState& state, Side player) {
  if (state.terminal()) throw ContractViolation("legal_action_mask: state is terminal");
  ActionMask m;
  m.legal[kHeadOffsets[0]] = true;
  m.legal[kHeadOffsets[1]] = true;
  m.legal[kHeadOffsets[2]] = true;
  m.legal[kHeadOffsets[3]] = true;
  const FighterState& f = state.fighter(player);
  if (f.stun_remaining > 0) return m;
  const bool busy = f.active_skill.has_value();
  for (int d = 0; d < kNumDirections; ++d) m.legal[kHeadOffsets[3] + d] = true;
  if (!busy) {
    for (int i = 0; i < 3; ++i) m.legal[kHeadOffsets[0] + i] = m.legal[kHeadOffsets[1] + i] = true;
  }
  const CharacterSpec& spec = state.spec(player);
  for (int i = 0; i < kNumSkills; ++i) {
    const SkillSlot slot = slot_of(i);
    const SkillSpec& s = spec.skills[i];
    bool ok = f.cooldown_remaining[i] == 0 && f.energy >= s.energy_cost;
    if (slot == SkillSlot::kSubstitute) {
      ok = ok && f.substitute_remaining == 0;
    } else {
      ok = ok && !busy;
    }
    if (slot == SkillSlot::kSubskill1) ok = ok && f.combo_parent == SkillSlot::kSkill1 && f.combo_remaining > 0;
    if (slot == SkillSlot::kSubskill2) ok = ok && f.combo_parent == SkillSlot::kSkill2 && f.combo_remaining > 0;
    m.legal[kHeadOffsets[2] + static_cast<int>(slot)] = ok;
  }
  return m;
}

Outcome outcome_of(const GameState& s) {
  const int a = s.fighters[0].hp, b = s.fighters[1].hp;
  if (a == 0 && b == 0) return Outcome::kDraw;
  if (a == 0) return Outcome::kBWins;
  if (b == 0) return Outcome::kAWins;
  if (s.frame >= s.horizon) {
    if (a == b) return Outcome::kDraw;
    return a > b ? Outcome::kAWins : Outcome::kBWins;
  }
  return Outcome::kOngoing;
}

StepInfo advance(GameState& s, const ActionTriple& act_a, const ActionTriple& act_b) {
  if (s.terminal()) throw ContractViolation("step: state is terminal");
  const std::array<ActionTriple, 2> acts{act_a, act_b};
  for (Side side : {Side::kA, Side::kB}) {
    if (!legal_action_mask(s, side).allows(acts[idx(side)])) {
      throw ContractViolation(std::string("step: illegal action for side ") + (side == Side::kA ? "A" : "B") +
                              " (" + describe(acts[idx(side)]) + ") at frame " + std::to_string(s.frame));
    }
  }
  StepInfo info;
  info.hp.before = {s.fighters[0].hp, s.fighters[1].hp};

  // Inputs: skill starts, then movement for fighters that are still free.
  for (Side side : {Side::kA, Side::kB}) {
    if (acts[idx(side)].skill != SkillSlot::kNone) start_skill(s, side, acts[idx(side)], info);
  }
  for (Side side : {Side::kA, Side::kB}) move(s, side, acts[idx(side)]);
  for (Side side : {Side::kA, Side::kB}) {
    FighterState& f = s.fighter(side);
    if (!f.active_skill && f.stun_remaining == 0) f.facing = facing_towards(s, side, f.facing);
  }

  // Elements: existing projectiles travel, then skills reaching the end of
  // their startup spawn projectiles or apply buffs.
  std::erase_if(s.projectiles, [&](Projectile& p) {
    p.pos.x += p.velocity.x;
    p.pos.y += p.velocity.y;
    p.frames_remaining -= 1;
    return p.frames_remaining <= 0 || p.pos.x < 0.0 || p.pos.x > s.arena.width || p.pos.y < 0.0 ||
           p.pos.y > s.arena.height;
  });
  for (Side side : {Side::kA, Side::kB}) {
    FighterState& f = s.fighter(side);
    if (!f.active_skill || f.active_skill->frames_elapsed != s.spec(side).skill(f.active_skill->slot).startup) continue;
    const SkillSpec& spec = s.spec(side).skill(f.active_skill->slot);
    if (spec.kind == SkillKind::kProjectile) {
      const Vec2 u = direction_vector(f.active_skill->direction);
      Projectile p;
      p.owner = side;
      p.pos = Vec2{f.pos.x + u.x * spec.hitbox.x, f.pos.y + u.y * spec.hitbox.x};
      p.velocity = Vec2{u.x * spec.projectile_speed, u.y * spec.projectile_speed};
      p.frames_remaining = spec.active;
      p.damage = spec.damage;
      p.hitstun = spec.hitstun;
      p.width = spec.hitbox.width;
      p.height = spec.hitbox.height;
      if (f.buff_remaining > 0) p.damage = static_cast<int>(std::lround(p.damage * s.arena.buff_multiplier));
      s.projectiles.push_back(p);
    } else if (spec.kind == SkillKind::kBuff) {
      f.buff_remaining = spec.buff_frames;
    }
  }

  // Hit detection against the post-movement state; all hits of a frame
  // resolve simultaneously.
  std::vector<PendingHit> pending;
  for (Side side : {Side::kA, Side::kB}) {
    const FighterState& f = s.fighter(side);
    if (!f.active_skill || f.active_skill->has_hit) continue;
    const SkillSpec& spec = s.spec(side).skill(f.active_skill->slot);
    if (spec.kind != SkillKind::kMelee || !in_active_window(spec, f.active_skill->frames_elapsed)) continue;
    if (intersects(melee_rect(f, spec, f.active_skill->direction, f.facing), hurtbox_rect(s, other(side)))) {
      int dmg = spec.damage;
      if (f.buff_remaining > 0) dmg = static_cast<int>(std::lround(dmg * s.arena.buff_multiplier));
      pending.push_back({side, f.active_skill->slot, dmg, spec.hitstun, -1});
    }
  }
  for (int i = 0; i < static_cast<int>(s.projectiles.size()); ++i) {
    const Projectile& p = s.projectiles[i];
    if (intersects(centred(p.pos, p.width, p.height), hurtbox_rect(s, other(p.owner)))) {
      pending.push_back({p.owner, SkillSlot::kScroll, p.damage, p.hitstun, i});
    }
  }
  std::array<bool, 2> was_hit{false, false};
  std::vector<int> spent_projectiles;
  std::vector<PendingHit> landed;
  for (const PendingHit& h : pending) {
    FighterState& attacker = s.fighter(h.attacker);
    FighterState& defender = s.fighter(other(h.attacker));
    if (h.projectile >= 0) spent_projectiles.push_back(h.projectile);
    if (h.projectile < 0 && attacker.active_skill) attacker.active_skill->has_hit = true;
    if (defender.substitute_remaining > 0) {
      defender.substitute_remaining = 0;
      attacker.stun_remaining = std::max(attacker.stun_remaining, s.arena.counter_stun);
      attacker.active_skill.reset();
      clear_combo(attacker);
      was_hit[idx(h.attacker)] = true;
      info.hits.push_back({h.attacker, h.slot, HitResult::kNegated, 0});
      continue;
    }
    defender.hp = std::max(0, defender.hp - h.damage);
    defender.stun_remaining = std::max(defender.stun_remaining, h.hitstun);
    defender.active_skill.reset();
    clear_combo(defender);
    was_hit[idx(other(h.attacker))] = true;
    landed.push_back(h);
    info.hits.push_back({h.attacker, h.slot, HitResult::kHit, h.damage});
  }
  for (const PendingHit& h : landed) {
    if (was_hit[idx(h.attacker)]) continue;
    if (h.slot == SkillSlot::kSkill1 || h.slot == SkillSlot::kSkill2) {
      FighterState& attacker = s.fighter(h.attacker);
      attacker.combo_parent = h.slot;
      attacker.combo_remaining = s.arena.combo_window;
    }
  }
  std::sort(spent_projectiles.begin(), spent_projectiles.end(), std::greater<>());
  spent_projectiles.erase(std::unique(spent_projectiles.begin(), spent_projectiles.end()), spent_projectiles.end());
  for (int i : spent_projectiles) s.projectiles.erase(s.projectiles.begin() + i);

  // Timers.
  for (Side side : {Side::kA, Side::kB}) {
    FighterState& f = s.fighter(side);
    const CharacterSpec& spec = s.spec(side);
    for (int& cd : f.cooldown_remaining) cd = std::max(0, cd - 1);
    f.stun_remaining = std::max(0, f.stun_remaining - 1);
    f.substitute_remaining = std::max(0, f.substitute_remaining - 1);
    f.buff_remaining = std::max(0, f.buff_remaining - 1);
    f.combo_remaining = std::max(0, f.combo_remaining - 1);
    if (f.combo_remaining == 0) f.combo_parent = SkillSlot::kNone;
    f.energy = std::min(spec.max_energy, f.energy + spec.energy_regen);
    if (f.active_skill) {
      f.active_skill->frames_elapsed += 1;
      if (f.active_skill->frames_elapsed >= spec.skill(f.active_skill->slot).busy_frames()) f.active_skill.reset();
    }
  }

  s.frame += 1;
  info.hp.after = {s.fighters[0].hp, s.fighters[1].hp};
  info.outcome = outcome_of(s);
  info.terminal = info.outcome != Outcome::kOngoing;
  return info;
}

StepResult step(const GameState& state, const ActionTriple& act_a, const ActionTriple& act_b) {
  StepResult r{state, {}};
  r.info = advance(r.state, act_a, act_b);
  return r;
}

}  // namespace helt::game
