#include "helt/eval/behavior.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "helt/core/error.hpp"
#include "helt/game/arena.hpp"

namespace helt::eval {
namespace {

using game::Side;
using game::SkillSlot;
using Kind = BehaviorEvent::Kind;

bool offensive(SkillSlot s) {
  return s != SkillSlot::kNone && s != SkillSlot::kSubstitute && s != SkillSlot::kSummon;
}

double ratio(int num, int den) { return den > 0 ? static_cast<double>(std::min(num, den)) / den : 0.0; }

SkillSlot special_slot(const game::CharacterSpec& c) {
  SkillSlot best = SkillSlot::kSkill3;
  int dmg = -1;
  for (int i = 0; i < game::kNumSkills; ++i) {
    const SkillSlot slot = game::slot_of(i);
    if (offensive(slot) && c.skills[i].damage > dmg) {
      best = slot;
      dmg = c.skills[i].damage;
    }
  }
  return best;
}

constexpr std::array<const char*, 4> kOutcomeNames{"ongoing", "a_wins", "b_wins", "draw"};

}  // namespace

BehaviorLog begin_log(const game::CharacterSpec& a, const game::CharacterSpec& b) {
  BehaviorLog log;
  log.char_ids = {a.char_id, b.char_id};
  log.special = {special_slot(a), special_slot(b)};
  log.substitute_window = {a.skill(SkillSlot::kSubstitute).active, b.skill(SkillSlot::kSubstitute).active};
  return log;
}

void append_step(BehaviorLog& log, int frame, const game::StepInfo& info, const game::GameState& after) {
  const std::array<int, 2> hp{after.fighters[0].hp, after.fighters[1].hp};
  const std::array<double, 2> energy{after.fighters[0].energy, after.fighters[1].energy};
  for (const game::SkillStart& s : info.starts) log.events.push_back({frame, s.side, s.slot, Kind::kStart, 0, hp, energy});
  for (const game::HitEvent& h : info.hits) {
    log.events.push_back({frame, h.attacker, h.slot, h.result == game::HitResult::kHit ? Kind::kHit : Kind::kNegated,
                          h.damage, hp, energy});
  }
  log.frames = after.frame;
  log.outcome = game::outcome_of(after);
}

double metric(const BehaviorScores& s, int index) {
  switch (index) {
    case 0: return s.substitution;
    case 1: return s.special;
    case 2: return s.blitz;
    case 3: return s.counter;
    case 4: return s.attack;
    case 5: return s.error_rate;
  }
  throw ContractViolation("behavior: metric index out of range");
}

BehaviorScores behavior_scores(const BehaviorLog& log, Side side, const BehaviorConfig& cfg) {
  const Side opp = game::other(side);
  std::array<int, game::kNumSkillSlots> starts{}, hits{};
  int negated_by_me = 0;
  int first_offense = -1;
  for (const BehaviorEvent& e : log.events) {
    if (e.side == side && e.kind == Kind::kStart) {
      starts[static_cast<int>(e.slot)] += 1;
      if (first_offense < 0 && offensive(e.slot)) first_offense = e.frame;
    }
    if (e.side == side && e.kind == Kind::kHit) hits[static_cast<int>(e.slot)] += 1;
    if (e.side == opp && e.kind == Kind::kNegated) negated_by_me += 1;
  }
  BehaviorScores s;
  s.substitution = ratio(negated_by_me, starts[static_cast<int>(SkillSlot::kSubstitute)]);
  const int special = static_cast<int>(log.special[game::idx(side)]);
  s.special = ratio(hits[special], starts[special]);
  const int punch = static_cast<int>(SkillSlot::kPunch);
  s.attack = ratio(hits[punch], starts[punch]);
  if (first_offense >= 0 && first_offense < cfg.opening_window) {
    s.blitz = 1.0 - static_cast<double>(first_offense) / cfg.opening_window;
  }

  int openers = 0, answered = 0;
  for (std::size_t k = 0; k < log.events.size(); ++k) {
    const BehaviorEvent& o = log.events[k];
    if (o.side != opp || o.kind != Kind::kStart || !offensive(o.slot) || o.frame >= cfg.opening_window) continue;
    ++openers;
    int negation = -1;
    for (std::size_t m = k; m < log.events.size(); ++m) {
      const BehaviorEvent& e = log.events[m];
      if (e.frame > o.frame + cfg.counter_window) break;
      if (negation < 0 && e.side == opp && e.kind == Kind::kNegated) negation = e.frame;
      if (negation >= 0 && e.side == side && e.kind == Kind::kHit && e.frame > negation &&
          e.frame <= negation + cfg.counter_window) {
        ++answered;
        break;
      }
    }
  }
  s.counter = ratio(answered, openers);
  s.error_rate = 1.0 - s.substitution;
  return s;
}

std::vector<CdfPoint> empirical_cdf(std::span<const double> scores) {
  HELT_EXPECT(!scores.empty(), "cdf: need at least one score");
  std::vector<double> x(scores.begin(), scores.end());
  std::sort(x.begin(), x.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i + 1 < x.size() && x[i + 1] == x[i]) continue;
    out.push_back({x[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

double ks_statistic_uniform(std::span<const double> scores) {
  HELT_EXPECT(!scores.empty(), "ks: need at least one score");
  std::vector<double> x(scores.begin(), scores.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = std::clamp(x[i], 0.0, 1.0);
    d = std::max({d, (i + 1) / n - v, v - i / n});
  }
  return d;
}

std::string cdf_report(const std::map<std::string, std::vector<BehaviorScores>>& populations) {
  std::string out = "metric,population,x,cdf\n";
  char line[256];
  for (int m = 0; m < static_cast<int>(kMetricNames.size()); ++m) {
    for (const auto& [name, scores] : populations) {
      std::vector<double> v;
      for (const BehaviorScores& s : scores) v.push_back(metric(s, m));
      for (const CdfPoint& p : empirical_cdf(v)) {
        std::snprintf(line, sizeof line, "%s,%s,%.6f,%.6f\n", kMetricNames[m], name.c_str(), p.x, p.p);
        out += line;
      }
    }
  }
  return out;
}

std::string log_to_json(const BehaviorLog& log) {
  nlohmann::json events = nlohmann::json::array();
  for (const BehaviorEvent& e : log.events) {
    events.push_back({e.frame, game::idx(e.side), static_cast<int>(e.slot), static_cast<int>(e.kind), e.damage,
                      e.hp[0], e.hp[1], e.energy[0], e.energy[1]});
  }
  nlohmann::json j{{"char_ids", log.char_ids},
                   {"special", {static_cast<int>(log.special[0]), static_cast<int>(log.special[1])}},
                   {"substitute_window", log.substitute_window},
                   {"frames", log.frames},
                   {"outcome", kOutcomeNames[static_cast<int>(log.outcome)]},
                   {"events", events}};
  return j.dump();
}

BehaviorLog log_from_json(const std::string& text) {
  BehaviorLog log;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    log.char_ids = j.at("char_ids").get<std::array<int, 2>>();
    const auto sp = j.at("special").get<std::array<int, 2>>();
    log.special = {static_cast<SkillSlot>(sp[0]), static_cast<SkillSlot>(sp[1])};
    log.substitute_window = j.at("substitute_window").get<std::array<int, 2>>();
    log.frames = j.at("frames").get<int>();
    const std::string outcome = j.at("outcome").get<std::string>();
    const auto it = std::find(kOutcomeNames.begin(), kOutcomeNames.end(), outcome);
    if (it == kOutcomeNames.end()) throw ConfigError("match log: unknown outcome '" + outcome + "'");
    log.outcome = static_cast<game::Outcome>(it - kOutcomeNames.begin());
    for (const auto& e : j.at("events")) {
      BehaviorEvent ev;
      ev.frame = e.at(0).get<int>();
      ev.side = static_cast<Side>(e.at(1).get<int>());
      ev.slot = static_cast<SkillSlot>(e.at(2).get<int>());
      ev.kind = static_cast<Kind>(e.at(3).get<int>());
      ev.damage = e.at(4).get<int>();
      ev.hp = {e.at(5).get<int>(), e.at(6).get<int>()};
      ev.energy = {e.at(7).get<double>(), e.at(8).get<double>()};
      log.events.push_back(ev);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("match log: ") + ex.what());
  }
  return log;
}

}  // namespace helt::eval
