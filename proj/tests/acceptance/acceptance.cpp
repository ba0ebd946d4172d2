// Runs the ten acceptance criteria and prints one verdict line per
// criterion. Exits 0 once every criterion has produced a verdict; --strict
// turns any FAIL into exit status 1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>

#include <CLI11.hpp>

#include "../support/oracles.hpp"
#include "helt/eval/elo.hpp"
#include "helt/harness/io.hpp"
#include "helt/harness/run.hpp"
#include "helt/league/driver.hpp"
#include "helt/matchup/regret_matching.hpp"

namespace {

using namespace helt;
namespace fs = std::filesystem;
using league::Role;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path g_scratch;

fs::path scratch(const std::string& name) {
  const fs::path p = g_scratch / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// 1. GAE against the brute-force sum.
Verdict gae_oracle() {
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const oracle::RandomTrajectory t = oracle::random_trajectory(rng);
    const learn::GaeResult g = learn::gae(t.rewards, t.values, t.terminals, t.bootstrap, t.gamma, t.lam);
    const std::vector<double> want = oracle::naive_gae(t);
    for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(g.advantages[i] - want[i]));
  }
  return {worst <= 1e-10, fmt("1000 trajectories, max |error| %.2e", worst)};
}

// 2. Full-loss gradient against central differences.
Verdict ppo_gradient() {
  Rng rng(202);
  learn::LearnerConfig cfg;
  cfg.normalize_advantages = false;
  double worst = 0.0;
  const std::array modes{enc::EncoderMode::kFIS, enc::EncoderMode::kQS, enc::EncoderMode::kFQS};
  for (int b = 0; b < 20; ++b) {
    const oracle::GradProblem g = oracle::random_grad_problem(oracle::small_spec(modes[b % 3]), 16, rng);
    worst = std::max(worst, oracle::grad_check(g.params, g.batch, cfg).rel_error);
  }
  return {worst <= 1e-4, fmt("20 mini-batches, max relative error %.2e", worst)};
}

// 3. PFSP normalization and sampling.
Verdict pfsp_exactness() {
  Rng rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> wr(std::uniform_int_distribution<int>(1, 10)(rng));
    for (double& x : wr) x = uniform01(rng);
    for (league::Weighting w : {league::Weighting::kHard, league::Weighting::kVar}) {
      const std::vector<double> got = league::pfsp_weights(wr, w, 2.0);
      const std::vector<double> want = oracle::pfsp_by_hand(wr, w, 2.0);
      for (std::size_t i = 0; i < wr.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    }
  }
  const std::vector<double> wr{0.5, 0.9, 0.2, 0.7};
  bool sampling_ok = true;
  double worst_z = 0.0;
  for (league::Weighting w : {league::Weighting::kHard, league::Weighting::kVar}) {
    const std::vector<double> p = league::pfsp_weights(wr, w, 2.0);
    constexpr int draws = 100000;
    std::vector<int> counts(wr.size(), 0);
    for (int k = 0; k < draws; ++k) counts[sample_index(p, rng)] += 1;
    for (std::size_t i = 0; i < wr.size(); ++i) {
      const double z = std::abs(counts[i] - draws * p[i]) / std::sqrt(draws * p[i] * (1 - p[i]));
      worst_z = std::max(worst_z, z);
      sampling_ok = sampling_ok && z <= 3.0;
    }
  }
  return {worst <= 1e-12 && sampling_ok, fmt("max |error| %.2e, worst sampling z %.2f", worst, worst_z)};
}

// 4. Regret-matching trace, fallback branch and invariants.
Verdict regret_trace() {
  constexpr double gamma = 0.5, eta = 0.1;
  const std::array<std::tuple<int, int, bool>, 6> seq{
      {{0, 1, true}, {1, 0, false}, {0, 0, true}, {1, 1, true}, {0, 1, false}, {1, 0, true}}};
  matchup::MatchupState s = matchup::MatchupState::create(2, gamma, eta);
  oracle::RmTrace t{s.wr_ema, s.regret, s.weights, 0.0};
  double worst = 0.0;
  for (const auto& [i, j, win] : seq) {
    t = oracle::rm_step(t, 2, i, j, win, gamma, eta);
    matchup::record_result(s, i, j, win);
    worst = std::max(worst, std::abs(matchup::expected_utility(s) - t.E));
    matchup::update_regret_and_weights(s);
    for (int k = 0; k < 4; ++k) {
      worst = std::max({worst, std::abs(s.wr_ema[k] - t.r[k]), std::abs(s.regret[k] - t.R[k]),
                        std::abs(s.weights[k] - t.w[k])});
    }
  }
  matchup::MatchupState fresh = matchup::MatchupState::create(2, gamma, eta);
  matchup::update_regret_and_weights(fresh);
  bool fallback = true;
  for (double w : fresh.weights) fallback = fallback && w == 0.25;

  Rng rng(404);
  matchup::MatchupState r = matchup::MatchupState::create(4, 0.9, 0.1);
  bool invariants = true;
  for (int k = 0; k < 100000 && invariants; ++k) {
    matchup::record_result(r, std::uniform_int_distribution<int>(0, 3)(rng), std::uniform_int_distribution<int>(0, 3)(rng),
                           uniform01(rng) < 0.5);
    matchup::update_regret_and_weights(r);
    double total = 0.0;
    for (std::size_t c = 0; c < r.weights.size(); ++c) {
      invariants = invariants && r.weights[c] >= 0.0 && r.regret[c] >= 0.0;
      total += r.weights[c];
    }
    invariants = invariants && std::abs(total - 1.0) <= 1e-12;
  }
  return {worst <= 1e-12 && fallback && invariants,
          fmt("trace max |error| %.2e, uniform fallback %s, invariants over 1e5 updates %s", worst,
              fallback ? "exact" : "off", invariants ? "hold" : "broken")};
}

// 5. League rule table under injected outcomes.
Verdict league_rules() {
  constexpr int runs = 1000, iterations = 5;
  league::DriverConfig d;
  d.league.total_iterations = iterations;
  d.league.iteration_timeout_steps = 600;
  d.num_characters = 2;
  auto outcome = [](const league::League&, Role, const league::Candidate&, Rng& rng) {
    return uniform01(rng) < 0.92 ? 1.0 : 0.0;
  };
  int main_resets = 0, mx_resets = 0, mx_snapshots = 0, lx_grace_resets = 0, lx_trials = 0, lx_resets = 0;
  int threshold = 0, timeout = 0, bad_snapshots = 0;
  for (int run = 0; run < runs; ++run) {
    d.seed = derive_seed(505, run);
    league::ScriptedSource src(outcome, 25, 10);
    const league::LeagueRun lr = league::run_league(d, src);
    std::array<std::int64_t, 3> last_snapshot{};
    for (const league::LeagueEvent& e : lr.league.events()) {
      const int r = league::ridx(e.role);
      if (e.kind == league::LeagueEvent::Kind::kSnapshot) {
        const std::int64_t in_iteration = e.member_steps - last_snapshot[r];
        last_snapshot[r] = e.member_steps;
        if (e.reason == "threshold") {
          ++threshold;
          bad_snapshots += e.min_winrate < 0.8;
        } else {
          ++timeout;
          bad_snapshots += in_iteration < d.league.iteration_timeout_steps || e.min_winrate >= 0.8;
        }
        if (e.role == Role::kMainExploiter) ++mx_snapshots;
        if (e.role == Role::kLeagueExploiter && e.generation > 3) ++lx_trials;
        continue;
      }
      if (e.role == Role::kMain) ++main_resets;
      if (e.role == Role::kMainExploiter) ++mx_resets;
      if (e.role == Role::kLeagueExploiter) ++lx_resets;
    }
    // Every member snapshots once per iteration, so generation g ends in iteration g.
    for (const league::LeagueEvent& e : lr.league.events()) {
      if (e.role == Role::kLeagueExploiter && e.kind == league::LeagueEvent::Kind::kReset && e.iteration <= 3) {
        ++lx_grace_resets;
      }
    }
  }
  const double p = 0.25, mean = lx_trials * p, half = 2.576 * std::sqrt(lx_trials * p * (1 - p));
  const bool rate_ok = std::abs(lx_resets - mean) <= half;
  const bool pass = main_resets == 0 && mx_resets == mx_snapshots && lx_grace_resets == 0 && rate_ok &&
                    bad_snapshots == 0 && threshold > 0 && timeout > 0;
  return {pass, fmt("main resets %d; main exploiter %d/%d; league exploiter %d/%d = %.3f (99%% CI %.3f..%.3f), "
                    "%d in generations 1-3; snapshots %d threshold + %d timeout, %d off-rule",
                    main_resets, mx_resets, mx_snapshots, lx_resets, lx_trials, double(lx_resets) / lx_trials,
                    (mean - half) / lx_trials, (mean + half) / lx_trials, lx_grace_resets, threshold, timeout,
                    bad_snapshots)};
}

// Shared desk-scale training setup for criteria 6-8.
harness::RunConfig training_config(std::uint64_t seed, int iterations, std::int64_t timeout) {
  harness::RunConfig c = harness::profile_defaults("desk");
  c.seed = seed;
  c.pool.per_level = 3;
  c.pool.seed = 7;
  c.subset.size = 6;
  c.league.main_mode = enc::EncoderMode::kQS;
  c.league.total_iterations = iterations;
  c.league.iteration_timeout_steps = timeout;
  c.learner.learning_rate = 2e-3;
  c.eval.final_matches = 0;
  c.eval.log_matches = 0;
  c.eval.greedy = true;
  return c;
}

// 6. End-to-end training against the two bots.
Verdict end_to_end() {
  harness::RunConfig c = training_config(7, 20, 10000);
  c.eval.final_matches = 500;
  const harness::TrainingResult res = harness::run_training(c, scratch("c6").string());
  const std::int64_t main_steps = res.run.league.member(Role::kMain).total_steps;
  std::int64_t all_steps = 0;
  for (Role r : league::kRoles) all_steps += res.run.league.member(r).total_steps;
  const harness::BotResult& rnd = res.final_eval.at(0);
  const harness::BotResult& scr = res.final_eval.at(1);
  const bool pass = rnd.score >= 0.70 && scr.score >= 0.60;
  return {pass, fmt("main %lld env steps (%lld all members); vs random %.3f (need 0.70), vs scripted %.3f (need 0.60), "
                    "%d matches each",
                    static_cast<long long>(main_steps), static_cast<long long>(all_steps), rnd.score, scr.score,
                    rnd.matches)};
}

// 7. Familiar to held-out rating drop, FIS main vs QS main.
Verdict generalization() {
  constexpr std::array<std::uint64_t, 3> seeds{11, 12, 13};
  std::array<double, 2> drop_sum{};
  std::string per_seed;
  for (std::uint64_t seed : seeds) {
    for (int m = 0; m < 2; ++m) {
      harness::RunConfig c = training_config(seed, 10, 10000);
      c.league.main_mode = m == 0 ? enc::EncoderMode::kFIS : enc::EncoderMode::kQS;
      c.league.allow_fis_main = m == 0;
      const harness::TrainingResult res = harness::run_training(c, scratch(fmt("c7_%d_%d", int(seed), m)).string());
      const harness::RunContext ctx = harness::make_context(c);
      eval::EvalOptions eo;
      eo.matches_per_pair = 100;
      eo.env = c.env;
      eo.seed = derive_seed(seed, 0x67656e);
      const int fs = c.env.frame_skip;
      const eval::GeneralizationReport g = eval::evaluate_generalization(
          harness::member_agent(ctx, Role::kMain, res.run.league.member(Role::kMain).params, true),
          {eval::random_agent(fs), eval::scripted_agent(fs)}, ctx.subset, harness::held_out(ctx.pool, ctx.subset), eo);
      drop_sum[m] += g.rating_drop();
      per_seed += fmt(" %s@%d=%.1f", m == 0 ? "FIS" : "QS", int(seed), g.rating_drop());
    }
  }
  const double fis = drop_sum[0] / seeds.size(), qs = drop_sum[1] / seeds.size();
  return {fis > qs, fmt("mean rating drop FIS %.1f vs QS %.1f;%s", fis, qs, per_seed.c_str())};
}

// 8. Episode length under aggressive vs cautious rewards.
Verdict style_lengths() {
  constexpr std::array<std::uint64_t, 3> seeds{21, 22, 23};
  std::array<double, 2> len_sum{};
  std::string per_seed;
  for (std::uint64_t seed : seeds) {
    for (int s = 0; s < 2; ++s) {
      harness::RunConfig c = training_config(seed, 10, 10000);
      const game::Style style = s == 0 ? game::Style::kAggressive : game::Style::kCautious;
      c.styles.fill(game::StyleReward::preset(style));
      c.eval.final_matches = 200;
      const harness::TrainingResult res = harness::run_training(c, scratch(fmt("c8_%d_%d", int(seed), s)).string());
      const double frames = res.final_eval.at(1).mean_frames;
      len_sum[s] += frames;
      per_seed += fmt(" %s@%d=%.0f", s == 0 ? "aggressive" : "cautious", int(seed), frames);
    }
  }
  const double agg = len_sum[0] / seeds.size(), cau = len_sum[1] / seeds.size();
  return {agg < cau, fmt("mean frames vs scripted bot: aggressive %.1f, cautious %.1f;%s", agg, cau, per_seed.c_str())};
}

// 9. Elo conservation and the equal-rating step.
Verdict elo_properties() {
  Rng rng(909);
  bool conserved = true;
  for (int k = 0; k < 100000; ++k) {
    const double ra = std::ldexp(std::round(std::ldexp(600 + 1200 * uniform01(rng), 16)), -16);
    const double rb = std::ldexp(std::round(std::ldexp(600 + 1200 * uniform01(rng), 16)), -16);
    const game::Outcome o = std::array{game::Outcome::kAWins, game::Outcome::kBWins, game::Outcome::kDraw}[k % 3];
    const auto [a, b] = eval::elo_update(ra, rb, o);
    conserved = conserved && a + b == ra + rb;
  }
  eval::EloTable t;
  for (int k = 0; k < 20000; ++k) {
    const int i = k % 5, j = (i + 1 + k % 4) % 5;
    t.record(std::to_string(i), std::to_string(j), uniform01(rng) < 0.5 ? game::Outcome::kAWins : game::Outcome::kBWins);
  }
  double total = 0.0;
  for (const auto& [id, r] : t.ratings()) total += r;
  conserved = conserved && total == 5 * eval::kEloStart;
  const auto [w, l] = eval::elo_update(1337.0, 1337.0, game::Outcome::kAWins);
  const bool half_k = w == 1337.0 + eval::kEloK / 2 && l == 1337.0 - eval::kEloK / 2;
  return {conserved && half_k, fmt("conservation %s over 1e5 updates and a 2e4-match table; equal-rating win %+.1f/%+.1f",
                                   conserved ? "exact" : "broken", w - 1337.0, l - 1337.0)};
}

// 10. Two CLI runs with the same config and seed.
Verdict cli_determinism() {
  const fs::path dir = scratch("c10");
  harness::RunConfig c = training_config(7, 3, 3000);
  c.eval.final_matches = 20;
  c.eval.log_matches = 5;
  harness::write_file_atomic((dir / "config.json").string(), harness::dump_config(c));
  std::array<std::string, 2> metrics;
  for (int k = 0; k < 2; ++k) {
    const fs::path out = dir / fmt("run%d", k);
    const std::string cmd = std::string(HELT_CLI) + " league run --config " + (dir / "config.json").string() +
                            " --seed 7 --quiet --out " + out.string() + " > " + (dir / "log.txt").string() + " 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "league run exited nonzero: " + harness::read_file((dir / "log.txt").string())};
    metrics[k] = harness::read_file((out / "metrics.csv").string());
  }
  const bool same = metrics[0] == metrics[1] && !metrics[0].empty();
  const long lines = std::count(metrics[0].begin(), metrics[0].end(), '\n');
  return {same, fmt("metrics.csv %s (%ld lines, sha256 %.12s)", same ? "byte-identical" : "differs", lines,
                    harness::sha256_hex(metrics[0]).c_str())};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  bool strict = false;
  app.add_option("--only", only, "criterion ids to run (default: all)")->check(CLI::Range(1, 10));
  app.add_flag("--strict", strict, "exit 1 if any criterion fails");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "GAE oracle", gae_oracle},
      {2, "PPO gradient check", ppo_gradient},
      {3, "PFSP exactness", pfsp_exactness},
      {4, "regret-matching trace", regret_trace},
      {5, "league rule conformance", league_rules},
      {6, "end-to-end training", end_to_end},
      {7, "generalization FIS vs QS", generalization},
      {8, "style episode length", style_lengths},
      {9, "Elo properties", elo_properties},
      {10, "CLI determinism", cli_determinism},
  };
  const std::set<int> selected(only.begin(), only.end());
  g_scratch = fs::temp_directory_path() / ("helt_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(g_scratch);

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::cout << fmt("criterion %2d %s  %-26s %s [%.1fs]", c.id, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str(), secs)
              << std::endl;
  }
  fs::remove_all(g_scratch);
  return strict && failed > 0 ? 1 : 0;
}
