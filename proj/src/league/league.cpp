#include "helt/league/league.hpp"

#include <algorithm>
#include <limits>

#include "helt/core/error.hpp"

namespace helt::league {
namespace {
constexpr std::array<std::string_view, 3> kRoleNames{"main", "main_exploiter", "league_exploiter"};
}

std::string_view to_string(Role role) { return kRoleNames[ridx(role)]; }

Role role_from_string(std::string_view text) {
  for (Role r : kRoles) {
    if (to_string(r) == text) return r;
  }
  throw ConfigError("unknown league role '" + std::string(text) + "'");
}

std::string_view to_string(LeagueEvent::Kind kind) {
  return kind == LeagueEvent::Kind::kSnapshot ? "snapshot" : "reset";
}

void validate(const LeagueConfig& c) {
  auto fail = [](const std::string& field, const std::string& why) { throw ConfigError("league." + field + ": " + why); };
  if (!(c.win_threshold > 0.0 && c.win_threshold < 1.0)) fail("win_threshold", "must be in (0, 1)");
  if (c.iteration_timeout_steps <= 0) fail("iteration_timeout_steps", "must be > 0");
  if (c.total_iterations < 0) fail("total_iterations", "must be >= 0");
  if (!(c.league_exploiter_reset_prob >= 0.0 && c.league_exploiter_reset_prob <= 1.0)) {
    fail("league_exploiter_reset_prob", "must be in [0, 1]");
  }
  if (!(c.p_hard > 0.0)) fail("p_hard", "must be > 0");
  if (c.reset_grace_iterations < 0) fail("reset_grace_iterations", "must be >= 0");
  if (c.reset_lookback <= 0) fail("reset_lookback", "must be > 0");
  if (c.min_matches < 0) fail("min_matches", "must be >= 0");
  if (!(c.winrate_smoothing >= 0.0 && c.winrate_smoothing < 1.0)) fail("winrate_smoothing", "must be in [0, 1)");
  if (c.main_mode == enc::EncoderMode::kFIS && !c.allow_fis_main) {
    fail("main_mode", "main agent must use QS or FQS (set allow_fis_main for the ablation)");
  }
}

enc::EncoderMode mode_for(Role role, const LeagueConfig& cfg) {
  return role == Role::kLeagueExploiter ? enc::EncoderMode::kFIS : cfg.main_mode;
}

League::League(LeagueConfig cfg, std::array<LeagueMember, 3> members)
    : cfg_(cfg), members_(std::move(members)), table_(cfg.winrate_smoothing) {
  validate(cfg_);
  for (Role r : kRoles) {
    if (members_[ridx(r)].role != r) throw ConfigError("league: members must be ordered main, main_exploiter, league_exploiter");
    if (members_[ridx(r)].mode != mode_for(r, cfg_)) {
      throw ConfigError("league: " + std::string(to_string(r)) + " has the wrong encoder mode");
    }
  }
}

void League::bootstrap() {
  HELT_EXPECT(pool_.empty(), "league: already bootstrapped");
  for (Role r : kRoles) {
    const LeagueMember& m = members_[ridx(r)];
    pool_.push_back({static_cast<int>(pool_.size()), r, 0, m.total_steps, m.mode, m.params});
  }
}

std::vector<Candidate> League::candidates(Role role) const {
  std::vector<Candidate> out;
  auto add_snapshots = [&](Weighting w, std::optional<Role> only) {
    for (const PolicySnapshot& s : pool_) {
      if (!only || s.role == *only) out.push_back({s.key(), s.id, std::nullopt, w});
    }
  };
  auto add_live = [&](Role r, Weighting w) { out.push_back({LeagueMember::live_key(r), std::nullopt, r, w}); };
  switch (role) {
    case Role::kMain:
      add_snapshots(cfg_.main_weighting, std::nullopt);
      break;
    case Role::kMainExploiter:
      add_live(Role::kMain, cfg_.main_exploiter_weighting);
      if (member(role).generation <= cfg_.reset_grace_iterations) {
        add_snapshots(cfg_.main_exploiter_weighting, Role::kMain);
      }
      break;
    case Role::kLeagueExploiter:
      add_snapshots(cfg_.league_exploiter_weighting, std::nullopt);
      add_live(Role::kMain, cfg_.league_exploiter_weighting);
      add_live(Role::kMainExploiter, cfg_.league_exploiter_weighting);
      break;
  }
  return out;
}

std::vector<double> League::candidate_winrates(Role role, const std::vector<Candidate>& cands) const {
  std::vector<double> wr;
  wr.reserve(cands.size());
  const std::string me = member(role).key();
  for (const Candidate& c : cands) wr.push_back(table_.winrate(me, c.key));
  return wr;
}

Candidate League::sample_opponent(Role role, Rng& rng) const {
  HELT_EXPECT(!pool_.empty(), "league: sample_opponent before bootstrap");
  const std::vector<Candidate> cands = candidates(role);
  HELT_EXPECT(!cands.empty(), "league: empty candidate set");
  const std::vector<double> wr = candidate_winrates(role, cands);
  // All candidates of one role share a weighting.
  const std::vector<double> p = pfsp_weights(wr, cands.front().weighting, cfg_.p_hard);
  return cands[sample_index(p, rng)];
}

ParamsPtr League::params_for(const Candidate& c) const {
  if (c.snapshot) return pool_.at(*c.snapshot).params;
  return member(*c.live).params;
}

void League::record_match(Role role, const std::string& opponent_key, double score) {
  table_.record(member(role).key(), opponent_key, score);
}

void League::add_steps(Role role, std::int64_t steps) {
  LeagueMember& m = members_[ridx(role)];
  m.steps_in_iteration += steps;
  m.total_steps += steps;
}

std::optional<double> League::min_winrate(Role role) const {
  const std::vector<Candidate> cands = candidates(role);
  const std::string me = member(role).key();
  double lo = std::numeric_limits<double>::infinity();
  for (const Candidate& c : cands) {
    if (table_.matches(me, c.key) < cfg_.min_matches) return std::nullopt;
    lo = std::min(lo, table_.winrate(me, c.key));
  }
  if (cands.empty()) return std::nullopt;
  return lo;
}

bool League::should_snapshot(Role role) const {
  const std::optional<double> lo = min_winrate(role);
  return (lo && *lo >= cfg_.win_threshold) || member(role).steps_in_iteration >= cfg_.iteration_timeout_steps;
}

int League::publish(Role role) {
  const LeagueMember& m = member(role);
  const int id = static_cast<int>(pool_.size());
  pool_.push_back({id, role, m.generation, m.total_steps, m.mode, m.params});
  return id;
}

SnapshotResult League::on_snapshot(Role role, Rng& rng, int iteration) {
  LeagueMember& m = members_[ridx(role)];
  const std::optional<double> lo = min_winrate(role);
  const bool threshold = lo && *lo >= cfg_.win_threshold;
  SnapshotResult result;
  result.snapshot_id = publish(role);
  result.min_winrate = lo.value_or(-1.0);
  const int gen = m.generation;
  events_.push_back({iteration, role, LeagueEvent::Kind::kSnapshot, result.snapshot_id, gen, m.total_steps,
                     threshold ? "threshold" : "timeout", lo.value_or(-1.0)});

  std::string why;
  if (role == Role::kMainExploiter) {
    result.reset = true;
    why = "always";
  } else if (role == Role::kLeagueExploiter && gen > cfg_.reset_grace_iterations) {
    result.reset = uniform01(rng) < cfg_.league_exploiter_reset_prob;
    why = "random";
  }
  if (result.reset) {
    std::vector<int> window;
    for (const PolicySnapshot& s : pool_) {
      if (s.role == role && s.generation >= gen - cfg_.reset_lookback && s.generation < gen) window.push_back(s.id);
    }
    int target_gen = -1;
    if (!window.empty()) {
      const int pick = window[std::uniform_int_distribution<std::size_t>(0, window.size() - 1)(rng)];
      result.reset_target = pick;
      target_gen = pool_[pick].generation;
      m.params = pool_[pick].params;
    } else {
      why = "fresh";
      m.params = nullptr;
    }
    m.resets += 1;
    table_.forget_player(m.key());
    events_.push_back({iteration, role, LeagueEvent::Kind::kReset, result.reset_target.value_or(-1), target_gen,
                       m.total_steps, why, lo.value_or(-1.0)});
  }
  m.generation += 1;
  m.steps_in_iteration = 0;
  return result;
}

}  // namespace helt::league
