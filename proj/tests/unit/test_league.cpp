#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "helt/core/error.hpp"
#include "helt/league/driver.hpp"

using namespace helt;
using namespace helt::league;
using Kind = LeagueEvent::Kind;

namespace {

League make_league(const LeagueConfig& cfg = {}) {
  std::array<LeagueMember, 3> m;
  for (Role r : kRoles) {
    m[ridx(r)].role = r;
    m[ridx(r)].mode = mode_for(r, cfg);
    m[ridx(r)].params = std::make_shared<const learn::PolicyParams>();
  }
  League l(cfg, m);
  l.bootstrap();
  return l;
}

void record_all(League& l, Role role, double score, int n) {
  for (const Candidate& c : l.candidates(role)) {
    for (int k = 0; k < n; ++k) l.record_match(role, c.key, score);
  }
}

std::vector<LeagueEvent> events_of(const std::vector<LeagueEvent>& all, Role role) {
  std::vector<LeagueEvent> out;
  for (const LeagueEvent& e : all) {
    if (e.role == role) out.push_back(e);
  }
  return out;
}

DriverConfig scripted_driver(int iterations) {
  DriverConfig d;
  d.league.total_iterations = iterations;
  d.league.iteration_timeout_steps = 1'000'000'000;
  d.num_characters = 2;
  d.seed = 11;
  return d;
}

}  // namespace

TEST(Pfsp, Examples) {
  const std::vector<double> w = pfsp_weights(std::vector<double>{0.5, 0.9}, Weighting::kVar, 2.0);
  EXPECT_NEAR(w[0], 25.0 / 34.0, 1e-12);
  EXPECT_NEAR(w[1], 9.0 / 34.0, 1e-12);
  EXPECT_EQ(pfsp_weights(std::vector<double>{0.0, 1.0}, Weighting::kHard, 2.0), (std::vector<double>{1.0, 0.0}));
  for (double v : pfsp_weights(std::vector<double>(5, 0.3), Weighting::kHard, 2.0)) EXPECT_NEAR(v, 0.2, 1e-15);
  for (double v : pfsp_weights(std::vector<double>{0.0, 1.0, 1.0}, Weighting::kVar, 2.0)) EXPECT_EQ(v, 1.0 / 3.0);
}

TEST(Pfsp, EmptyCandidateSetIsContractViolation) {
  EXPECT_THROW(pfsp_weights(std::vector<double>{}, Weighting::kHard, 2.0), ContractViolation);
}

TEST(Pfsp, MatchesHandNormalizationAndIsDistribution) {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> wr(std::uniform_int_distribution<int>(1, 12)(rng));
    for (double& x : wr) x = uniform01(rng) < 0.1 ? std::round(uniform01(rng)) : uniform01(rng);
    const double p = std::uniform_real_distribution<double>(0.5, 4.0)(rng);
    for (Weighting w : {Weighting::kHard, Weighting::kVar}) {
      const std::vector<double> got = pfsp_weights(wr, w, p);
      const std::vector<double> want = oracle::pfsp_by_hand(wr, w, p);
      double total = 0.0;
      for (std::size_t i = 0; i < wr.size(); ++i) {
        ASSERT_NEAR(got[i], want[i], 1e-12);
        ASSERT_GE(got[i], 0.0);
        total += got[i];
      }
      ASSERT_NEAR(total, 1.0, 1e-12);
      if (w == Weighting::kHard) {
        for (std::size_t a = 0; a < wr.size(); ++a) {
          for (std::size_t b = 0; b < wr.size(); ++b) {
            if (wr[a] < wr[b]) ASSERT_GE(got[a], got[b]);
          }
        }
      }
    }
  }
}

TEST(Pfsp, SamplingFrequencies) {
  const std::vector<double> p = pfsp_weights(std::vector<double>{0.5, 0.9}, Weighting::kVar, 2.0);
  Rng rng(2);
  constexpr int draws = 100000;
  int first = 0;
  for (int k = 0; k < draws; ++k) first += sample_index(p, rng) == 0;
  const double sigma = std::sqrt(draws * p[0] * p[1]);
  EXPECT_LE(std::abs(first - draws * 25.0 / 34.0), 3 * sigma);
}

TEST(WinRates, BiasCorrectedEma) {
  WinRateTable t(0.99);
  EXPECT_EQ(t.winrate("a", "b"), 0.5);
  t.record("a", "b", 1.0);
  EXPECT_NEAR(t.winrate("a", "b"), 1.0, 1e-12);
  t.record("a", "b", 0.0);
  EXPECT_NEAR(t.winrate("a", "b"), 0.99 * 0.01 / (1 - 0.99 * 0.99), 1e-12);
  EXPECT_EQ(t.matches("a", "b"), 2);
  t.forget_player("a");
  EXPECT_EQ(t.matches("a", "b"), 0);
  EXPECT_THROW(t.record("a", "b", 1.5), ContractViolation);
}

TEST(LeagueRules, RoleStructureIsValidated) {
  LeagueConfig c;
  c.main_mode = enc::EncoderMode::kFIS;
  EXPECT_THROW(validate(c), ConfigError);
  c.allow_fis_main = true;
  EXPECT_NO_THROW(validate(c));
  EXPECT_EQ(mode_for(Role::kMainExploiter, c), enc::EncoderMode::kFIS);
  LeagueConfig q;
  q.main_mode = enc::EncoderMode::kFQS;
  EXPECT_EQ(mode_for(Role::kMainExploiter, q), enc::EncoderMode::kFQS);
  EXPECT_EQ(mode_for(Role::kLeagueExploiter, q), enc::EncoderMode::kFIS);

  std::array<LeagueMember, 3> m;
  for (Role r : kRoles) m[ridx(r)] = {r, enc::EncoderMode::kQS};
  EXPECT_THROW(League(LeagueConfig{}, m), ConfigError);  // league exploiter must be FIS
}

TEST(LeagueRules, CandidateSets) {
  League l = make_league();
  EXPECT_EQ(l.candidates(Role::kMain).size(), 3u);
  // Live main plus the one bootstrap main snapshot during grace.
  EXPECT_EQ(l.candidates(Role::kMainExploiter).size(), 2u);
  EXPECT_EQ(l.candidates(Role::kLeagueExploiter).size(), 5u);
}

TEST(LeagueRules, MainExploiterAfterGraceAlwaysFacesLiveMain) {
  League l = make_league();
  Rng rng(3);
  for (int it = 1; it <= l.config().reset_grace_iterations; ++it) l.on_snapshot(Role::kMainExploiter, rng, it);
  const auto cands = l.candidates(Role::kMainExploiter);
  ASSERT_EQ(cands.size(), 1u);
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(l.sample_opponent(Role::kMainExploiter, rng).key, LeagueMember::live_key(Role::kMain));
}

TEST(LeagueRules, SampleOpponentFollowsPfsp) {
  LeagueConfig cfg;
  cfg.main_weighting = Weighting::kVar;
  League l = make_league(cfg);
  const std::array<double, 3> wr{0.5, 0.9, 0.2};
  for (int s = 0; s < 3; ++s) l.record_match(Role::kMain, l.pool()[s].key(), wr[s]);
  const std::vector<double> p = oracle::pfsp_by_hand({wr.begin(), wr.end()}, Weighting::kVar, cfg.p_hard);
  Rng rng(4);
  constexpr int draws = 100000;
  std::array<int, 3> counts{};
  for (int k = 0; k < draws; ++k) counts[*l.sample_opponent(Role::kMain, rng).snapshot] += 1;
  for (int s = 0; s < 3; ++s) EXPECT_LE(std::abs(counts[s] - draws * p[s]), 3 * std::sqrt(draws * p[s] * (1 - p[s])));
}

TEST(LeagueRules, ShouldSnapshotBranches) {
  League l = make_league();
  record_all(l, Role::kMain, 0.81, 20);
  EXPECT_TRUE(l.should_snapshot(Role::kMain));

  League low = make_league();
  record_all(low, Role::kMain, 0.81, 20);
  for (int k = 0; k < 200; ++k) low.record_match(Role::kMain, low.pool()[1].key(), 0.79);
  EXPECT_LT(low.table().winrate(low.member(Role::kMain).key(), low.pool()[1].key()), 0.8);
  EXPECT_FALSE(low.should_snapshot(Role::kMain));

  League few = make_league();
  record_all(few, Role::kMain, 1.0, 19);
  EXPECT_FALSE(few.should_snapshot(Role::kMain));

  League timeout = make_league();
  record_all(timeout, Role::kMain, 0.0, 20);
  timeout.add_steps(Role::kMain, timeout.config().iteration_timeout_steps - 1);
  EXPECT_FALSE(timeout.should_snapshot(Role::kMain));
  timeout.add_steps(Role::kMain, 1);
  EXPECT_TRUE(timeout.should_snapshot(Role::kMain));
}

TEST(LeagueRules, MainSnapshotKeepsParams) {
  League l = make_league();
  Rng rng(5);
  const ParamsPtr before = l.member(Role::kMain).params;
  const std::size_t pool = l.pool().size();
  const SnapshotResult r = l.on_snapshot(Role::kMain, rng, 1);
  EXPECT_FALSE(r.reset);
  EXPECT_EQ(l.pool().size(), pool + 1);
  EXPECT_EQ(l.member(Role::kMain).params, before);
  EXPECT_EQ(l.pool().back().params, before);
  EXPECT_EQ(l.member(Role::kMain).generation, 2);
  EXPECT_EQ(l.member(Role::kMain).steps_in_iteration, 0);
}

TEST(LeagueRules, MainExploiterAlwaysResets) {
  League l = make_league();
  Rng rng(6);
  for (int it = 1; it <= 8; ++it) {
    const int gen = l.member(Role::kMainExploiter).generation;
    const SnapshotResult r = l.on_snapshot(Role::kMainExploiter, rng, it);
    ASSERT_TRUE(r.reset);
    ASSERT_TRUE(r.reset_target.has_value());
    const PolicySnapshot& target = l.pool()[*r.reset_target];
    EXPECT_EQ(target.role, Role::kMainExploiter);
    EXPECT_GE(target.generation, gen - 3);
    EXPECT_LT(target.generation, gen);
    EXPECT_EQ(l.member(Role::kMainExploiter).params, target.params);
  }
}

TEST(LeagueRules, LeagueExploiterNeverResetsInGrace) {
  for (int trial = 0; trial < 1000; ++trial) {
    League l = make_league();
    Rng rng(derive_seed(7, trial));
    for (int it = 1; it <= 3; ++it) ASSERT_FALSE(l.on_snapshot(Role::kLeagueExploiter, rng, it).reset);
  }
}

TEST(LeagueRules, LeagueExploiterResetRate) {
  League l = make_league();
  Rng rng(8);
  for (int it = 1; it <= 3; ++it) l.on_snapshot(Role::kLeagueExploiter, rng, it);
  constexpr int trials = 1000;
  int resets = 0;
  for (int it = 0; it < trials; ++it) resets += l.on_snapshot(Role::kLeagueExploiter, rng, 4 + it).reset;
  // Binomial 99% interval around 250.
  EXPECT_LE(std::abs(resets - 250.0), 2.576 * std::sqrt(trials * 0.25 * 0.75));
}

TEST(LeagueRules, PoolIsAppendOnly) {
  League l = make_league();
  Rng rng(9);
  std::vector<std::pair<int, ParamsPtr>> seen;
  for (const auto& s : l.pool()) seen.emplace_back(s.generation, s.params);
  for (int it = 1; it <= 10; ++it) {
    for (Role r : kRoles) l.on_snapshot(r, rng, it);
    for (std::size_t k = 0; k < seen.size(); ++k) {
      ASSERT_EQ(l.pool()[k].generation, seen[k].first);
      ASSERT_EQ(l.pool()[k].params, seen[k].second);
    }
    for (std::size_t k = seen.size(); k < l.pool().size(); ++k) seen.emplace_back(l.pool()[k].generation, l.pool()[k].params);
  }
}

TEST(Driver, ZeroIterationsLeavesBootstrapOnly) {
  ScriptedSource src([](const League&, Role, const Candidate&, Rng&) { return 1.0; }, 20, 10);
  const LeagueRun run = run_league(scripted_driver(0), src);
  EXPECT_EQ(run.league.pool().size(), 3u);
  EXPECT_TRUE(run.league.events().empty());
  EXPECT_TRUE(run.metrics.empty());
}

TEST(Driver, ScriptedRuleTrace) {
  DriverConfig d = scripted_driver(6);
  d.league.league_exploiter_reset_prob = 1.0;
  ScriptedSource src([](const League&, Role, const Candidate&, Rng&) { return 1.0; }, 40, 5);
  const LeagueRun run = run_league(d, src);
  const auto& ev = run.league.events();

  const auto main = events_of(ev, Role::kMain);
  ASSERT_EQ(main.size(), 6u);
  for (int it = 1; it <= 6; ++it) {
    EXPECT_EQ(main[it - 1].kind, Kind::kSnapshot);
    EXPECT_EQ(main[it - 1].iteration, it);
    EXPECT_EQ(main[it - 1].generation, it);
    EXPECT_EQ(main[it - 1].reason, "threshold");
    EXPECT_EQ(main[it - 1].min_winrate, 1.0);
  }

  const auto mx = events_of(ev, Role::kMainExploiter);
  ASSERT_EQ(mx.size(), 12u);
  for (int it = 1; it <= 6; ++it) {
    const LeagueEvent& snap = mx[2 * (it - 1)];
    const LeagueEvent& reset = mx[2 * (it - 1) + 1];
    EXPECT_EQ(snap.kind, Kind::kSnapshot);
    EXPECT_EQ(reset.kind, Kind::kReset);
    EXPECT_EQ(reset.reason, "always");
    EXPECT_EQ(run.league.pool()[reset.snapshot_id].role, Role::kMainExploiter);
    EXPECT_GE(reset.generation, it - 3);
    EXPECT_LT(reset.generation, it);
  }

  // Reset probability 1: no resets in generations 1-3, then one per snapshot.
  const auto lx = events_of(ev, Role::kLeagueExploiter);
  ASSERT_EQ(lx.size(), 3u + 2u * 3u);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(lx[k].kind, Kind::kSnapshot);
  for (int k = 3; k < 9; k += 2) {
    EXPECT_EQ(lx[k].kind, Kind::kSnapshot);
    EXPECT_EQ(lx[k + 1].kind, Kind::kReset);
    EXPECT_EQ(lx[k + 1].reason, "random");
  }
  EXPECT_EQ(run.league.member(Role::kMain).resets, 0);
  EXPECT_EQ(run.league.member(Role::kMainExploiter).resets, 6);
  EXPECT_EQ(run.league.member(Role::kLeagueExploiter).resets, 3);
  EXPECT_EQ(run.league.pool().size(), 3u + 18u);
}

TEST(Driver, TimeoutBranch) {
  DriverConfig d = scripted_driver(2);
  d.league.iteration_timeout_steps = 100;
  ScriptedSource src([](const League&, Role, const Candidate&, Rng&) { return 0.0; }, 20, 10);
  const LeagueRun run = run_league(d, src);
  for (const LeagueEvent& e : run.league.events()) {
    if (e.kind == Kind::kSnapshot) {
      EXPECT_EQ(e.reason, "timeout");
      EXPECT_EQ(e.member_steps % 200, 0);
    }
  }
  EXPECT_EQ(run.metrics.size(), 6u);
}

TEST(Driver, DeterministicUnderFixedSeed) {
  auto outcome = [](const League&, Role, const Candidate&, Rng& rng) { return uniform01(rng) < 0.85 ? 1.0 : 0.0; };
  DriverConfig d = scripted_driver(4);
  d.league.iteration_timeout_steps = 3000;
  ScriptedSource a(outcome, 30, 7), b(outcome, 30, 7);
  const LeagueRun ra = run_league(d, a), rb = run_league(d, b);
  EXPECT_EQ(ra.league.events(), rb.league.events());
  std::string ma, mb;
  for (const auto& row : ra.metrics) ma += metrics_line(row);
  for (const auto& row : rb.metrics) mb += metrics_line(row);
  EXPECT_EQ(ma, mb);
  EXPECT_EQ(events_csv(ra.league.events()), events_csv(rb.league.events()));
}

TEST(Driver, MainLineageNeverResets) {
  auto outcome = [](const League&, Role, const Candidate&, Rng& rng) { return uniform01(rng) < 0.9 ? 1.0 : 0.0; };
  DriverConfig d = scripted_driver(10);
  d.league.iteration_timeout_steps = 2000;
  ScriptedSource src(outcome, 25, 10);
  const LeagueRun run = run_league(d, src, [](const LeagueRun& r, int) {
    EXPECT_EQ(r.league.member(Role::kLeagueExploiter).mode, enc::EncoderMode::kFIS);
    EXPECT_EQ(r.league.member(Role::kMainExploiter).mode, r.league.member(Role::kMain).mode);
  });
  for (const LeagueEvent& e : run.league.events()) {
    EXPECT_FALSE(e.role == Role::kMain && e.kind == Kind::kReset);
  }
}
