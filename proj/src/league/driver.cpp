#include "helt/league/driver.hpp"

#include <algorithm>
#include <cstdio>
#include <future>

#include "helt/core/error.hpp"

namespace helt::league {
namespace {

game::Outcome outcome_from_score(double score) {
  if (score > 0.5) return game::Outcome::kAWins;
  if (score < 0.5) return game::Outcome::kBWins;
  return game::Outcome::kDraw;
}

std::uint64_t phase_seed(std::uint64_t seed, int iteration, int phase, Role role) {
  return derive_seed(seed, (static_cast<std::uint64_t>(iteration) << 32) | (static_cast<std::uint64_t>(phase) << 4) |
                               static_cast<std::uint64_t>(ridx(role)));
}

struct IterationTally {
  int episodes = 0;
  double score = 0.0;
  double frames = 0.0;
  double min_winrate = -1.0;
  learn::TrainStats last;
};

}  // namespace

std::string metrics_header() {
  return "iteration,member,generation,steps,elo,min_winrate,resets,pool_size,episodes,train_score,mean_frames,"
         "policy_loss,value_loss,entropy\n";
}

std::string metrics_line(const MetricsRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%d,%s,%d,%lld,%.4f,%.6f,%d,%d,%d,%.6f,%.2f,%.6f,%.6f,%.6f\n", r.iteration,
                std::string(to_string(r.role)).c_str(), r.generation, static_cast<long long>(r.steps), r.elo,
                r.min_winrate, r.resets, r.pool_size, r.episodes, r.train_score, r.mean_frames, r.policy_loss,
                r.value_loss, r.entropy);
  return buf;
}

std::string events_csv(const std::vector<LeagueEvent>& events) {
  std::string out = "iteration,member,event,snapshot_id,generation,member_steps,reason,min_winrate\n";
  char buf[256];
  for (const LeagueEvent& e : events) {
    std::snprintf(buf, sizeof buf, "%d,%s,%s,%d,%d,%lld,%s,%.6f\n", e.iteration,
                  std::string(to_string(e.role)).c_str(), std::string(to_string(e.kind)).c_str(), e.snapshot_id,
                  e.generation, static_cast<long long>(e.member_steps), e.reason.c_str(), e.min_winrate);
    out += buf;
  }
  return out;
}

LeagueRun run_league(const DriverConfig& cfg, PhaseSource& source, const IterationCallback& on_iteration) {
  validate(cfg.league);
  if (cfg.num_characters <= 0) throw ConfigError("league: training subset is empty");
  if (cfg.workers <= 0) throw ConfigError("workers: must be > 0");
  std::array<LeagueMember, 3> members;
  for (Role r : kRoles) {
    LeagueMember& m = members[ridx(r)];
    m.role = r;
    m.mode = mode_for(r, cfg.league);
    m.params = source.initial_params(r, m.mode);
  }
  const auto mk = [&] { return matchup::MatchupState::create(cfg.num_characters, cfg.matchup.gamma, cfg.matchup.eta); };
  LeagueRun run{League(cfg.league, members), {mk(), mk(), mk()}, eval::EloTable{}, {}};
  League& league = run.league;
  league.bootstrap();
  Rng rng(derive_seed(cfg.seed, 0x6c65616775ULL));
  const bool parallel = cfg.workers > 1 && !cfg.deterministic;

  for (int it = 1; it <= cfg.league.total_iterations; ++it) {
    std::vector<Role> pending(kRoles.begin(), kRoles.end());
    std::array<IterationTally, 3> tally{};
    for (int phase = 0; !pending.empty(); ++phase) {
      std::vector<PhaseReport> reports(pending.size());
      if (parallel) {
        std::vector<std::future<PhaseReport>> futures;
        for (Role r : pending) {
          futures.push_back(std::async(std::launch::async, [&, r] {
            return source.run_phase(league, r, run.matchups[ridx(r)], phase_seed(cfg.seed, it, phase, r));
          }));
        }
        for (std::size_t k = 0; k < futures.size(); ++k) reports[k] = futures[k].get();
      } else {
        for (std::size_t k = 0; k < pending.size(); ++k) {
          const Role r = pending[k];
          reports[k] = source.run_phase(league, r, run.matchups[ridx(r)], phase_seed(cfg.seed, it, phase, r));
        }
      }

      // Merge in fixed role order.
      for (std::size_t k = 0; k < pending.size(); ++k) {
        const Role r = pending[k];
        PhaseReport& rep = reports[k];
        HELT_EXPECT(rep.steps > 0, "league: a phase produced no environment steps");
        matchup::MatchupState& mu = run.matchups[ridx(r)];
        for (const MatchRecord& m : rep.matches) {
          league.record_match(r, m.opponent_key, m.score);
          matchup::record_result(mu, m.opp_index, m.learner_index, m.score == 1.0);
          matchup::update_regret_and_weights(mu);
          run.elo.record(league.member(r).key(), m.opponent_key, outcome_from_score(m.score));
          tally[ridx(r)].episodes += 1;
          tally[ridx(r)].score += m.score;
          tally[ridx(r)].frames += m.frames;
        }
        league.add_steps(r, rep.steps);
        if (rep.params) league.set_params(r, rep.params);
        if (rep.stats.updates > 0) tally[ridx(r)].last = rep.stats;
      }

      std::vector<Role> still;
      for (Role r : pending) {
        if (!league.should_snapshot(r)) {
          still.push_back(r);
          continue;
        }
        const std::string live = league.member(r).key();
        const SnapshotResult s = league.on_snapshot(r, rng, it);
        tally[ridx(r)].min_winrate = s.min_winrate;
        run.elo.set(league.pool()[s.snapshot_id].key(), run.elo.rating(live));
        if (s.reset) {
          ParamsPtr target = s.reset_target ? league.pool()[*s.reset_target].params : nullptr;
          league.set_params(r, source.on_reset(r, target));
          run.elo.set(live, s.reset_target ? run.elo.rating(league.pool()[*s.reset_target].key()) : eval::kEloStart);
        }
      }
      pending = std::move(still);
    }

    for (Role r : kRoles) {
      const LeagueMember& m = league.member(r);
      const IterationTally& t = tally[ridx(r)];
      MetricsRow row;
      row.iteration = it;
      row.role = r;
      row.generation = m.generation - 1;
      row.steps = m.total_steps;
      row.elo = run.elo.rating(m.key());
      row.min_winrate = t.min_winrate;
      row.resets = m.resets;
      row.pool_size = static_cast<int>(league.pool().size());
      row.episodes = t.episodes;
      row.train_score = t.episodes > 0 ? t.score / t.episodes : 0.0;
      row.mean_frames = t.episodes > 0 ? t.frames / t.episodes : 0.0;
      row.policy_loss = t.last.policy_loss;
      row.value_loss = t.last.value_loss;
      row.entropy = t.last.entropy;
      run.metrics.push_back(row);
    }
    if (on_iteration) on_iteration(run, it);
  }
  return run;
}

PpoSource::PpoSource(PpoSourceConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.subset.empty()) throw ConfigError("league: training subset is empty");
  learn::validate(cfg_.learner);
  learn::validate(cfg_.env);
}

learn::PolicyParams PpoSource::fresh(Role role, int salt) const {
  Rng rng(derive_seed(cfg_.seed, 0x1000u + 0x100u * ridx(role) + salt));
  return learn::PolicyParams::init(slots_[ridx(role)].spec, rng);
}

ParamsPtr PpoSource::initial_params(Role role, enc::EncoderMode mode) {
  Slot& slot = slots_[ridx(role)];
  slot.spec = learn::NetSpec::for_mode(mode, cfg_.ids, cfg_.learner.hidden, cfg_.learner.embedding_width);
  slot.learner = std::make_unique<learn::Learner>(fresh(role, 0), cfg_.learner);
  slot.collector = std::make_unique<learn::RolloutCollector>(cfg_.env, cfg_.ids, cfg_.styles[ridx(role)],
                                                             cfg_.learner.envs_per_member,
                                                             derive_seed(cfg_.seed, 0x2000u + ridx(role)));
  return std::make_shared<const learn::PolicyParams>(slot.learner->params());
}

PhaseReport PpoSource::run_phase(const League& league, Role role, const matchup::MatchupState& mu,
                                 std::uint64_t seed) {
  Slot& slot = slots_[ridx(role)];
  HELT_EXPECT(slot.learner != nullptr, "ppo source: role was never initialized");
  const int frame_skip = cfg_.env.frame_skip;
  auto factory = [&](Rng& rng) {
    const Candidate c = league.sample_opponent(role, rng);
    const auto [i, j] = matchup::sample_pair(mu, rng);
    learn::MatchSetup s;
    s.learner_char = cfg_.subset.at(j);
    s.opp_char = cfg_.subset.at(i);
    s.learner_index = j;
    s.opp_index = i;
    s.opponent_key = c.key;
    ParamsPtr p = league.params_for(c);
    HELT_EXPECT(p != nullptr, "ppo source: opponent has no parameters");
    s.opponent = std::make_unique<learn::RepeatPolicy>(std::make_unique<learn::NeuralPolicy>(p, cfg_.ids), frame_skip);
    return s;
  };
  learn::RolloutCollector::Result res =
      slot.collector->collect(slot.learner->params(), cfg_.learner.batch_size, cfg_.learner.n_steps, factory);
  Rng rng(seed);
  PhaseReport rep;
  rep.stats = slot.learner->train(res.trajectories, rng);
  rep.steps = res.steps;
  for (const learn::EpisodeRecord& e : res.episodes) {
    rep.matches.push_back({e.opponent_key, e.learner_index, e.opp_index, e.learner_score(), e.frames});
  }
  rep.params = std::make_shared<const learn::PolicyParams>(slot.learner->params());
  return rep;
}

ParamsPtr PpoSource::on_reset(Role role, ParamsPtr target) {
  Slot& slot = slots_[ridx(role)];
  if (target) {
    slot.learner->reset(*target);
  } else {
    slot.learner->reset(fresh(role, ++slot.fresh_inits));
  }
  slot.collector->restart();
  return std::make_shared<const learn::PolicyParams>(slot.learner->params());
}

ScriptedSource::ScriptedSource(OutcomeFn outcome, int matches_per_phase, int steps_per_match)
    : outcome_(std::move(outcome)), matches_per_phase_(matches_per_phase), steps_per_match_(steps_per_match) {
  HELT_EXPECT(matches_per_phase_ > 0 && steps_per_match_ > 0, "scripted source: counts must be > 0");
}

ParamsPtr ScriptedSource::initial_params(Role, enc::EncoderMode) { return nullptr; }

PhaseReport ScriptedSource::run_phase(const League& league, Role role, const matchup::MatchupState& mu,
                                      std::uint64_t seed) {
  Rng rng(seed);
  PhaseReport rep;
  for (int k = 0; k < matches_per_phase_; ++k) {
    const Candidate c = league.sample_opponent(role, rng);
    const auto [i, j] = matchup::sample_pair(mu, rng);
    rep.matches.push_back({c.key, j, i, outcome_(league, role, c, rng), steps_per_match_});
  }
  rep.steps = static_cast<std::int64_t>(matches_per_phase_) * steps_per_match_;
  return rep;
}

ParamsPtr ScriptedSource::on_reset(Role, ParamsPtr target) { return target; }

}  // namespace helt::league
