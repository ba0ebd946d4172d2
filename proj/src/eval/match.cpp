#include "helt/eval/match.hpp"

#include <cstdio>
#include <thread>

#include "helt/core/error.hpp"
#include "helt/eval/bots.hpp"
#include "helt/game/arena.hpp"

namespace helt::eval {

MatchResult play_match(const game::CharacterSpec& a, const game::CharacterSpec& b, learn::Policy& pa,
                       learn::Policy& pb, const learn::EnvConfig& env, std::uint64_t seed, BehaviorLog* log) {
  game::GameState s = game::new_match(a, b, env.horizon, seed, env.arena);
  Rng rng(derive_seed(seed, 0x706c6179ULL));
  pa.begin_match();
  pb.begin_match();
  if (log) *log = begin_log(a, b);
  while (!s.terminal()) {
    const game::ActionTriple act_a = pa.act(s, game::Side::kA, rng);
    const game::ActionTriple act_b = pb.act(s, game::Side::kB, rng);
    const int frame = s.frame;
    const game::StepInfo info = game::advance(s, act_a, act_b);
    if (log) append_step(*log, frame, info, s);
  }
  return {game::outcome_of(s), s.frame, {s.fighters[0].hp, s.fighters[1].hp}};
}

Agent neural_agent(std::string name, std::shared_ptr<const learn::PolicyParams> params, enc::IdTable ids,
                   int frame_skip, bool greedy) {
  return {std::move(name), [params, ids, frame_skip, greedy] {
            return std::make_unique<learn::RepeatPolicy>(std::make_unique<learn::NeuralPolicy>(params, ids, greedy),
                                                         frame_skip);
          }};
}

Agent random_agent(int frame_skip) {
  return {"random", [frame_skip] {
            return std::make_unique<learn::RepeatPolicy>(std::make_unique<RandomPolicy>(), frame_skip);
          }};
}

Agent scripted_agent(int frame_skip) {
  return {"scripted", [frame_skip] {
            return std::make_unique<learn::RepeatPolicy>(std::make_unique<ScriptedAggressive>(), frame_skip);
          }};
}

double EvalMatch::challenger_score() const { return learn::score_for(outcome, challenger_side); }

double EvalReport::mean_score(int a) const {
  double total = 0.0;
  int n = 0;
  for (const EvalMatch& m : matches) {
    if (m.challenger == a) {
      total += m.challenger_score();
      ++n;
    } else if (m.opponent == a) {
      total += 1.0 - m.challenger_score();
      ++n;
    }
  }
  return n > 0 ? total / n : 0.0;
}

std::string EvalReport::matrix_csv() const {
  std::string out = "agent,opponent,score,matches\n";
  char line[256];
  for (std::size_t a = 0; a < names.size(); ++a) {
    for (std::size_t b = 0; b < names.size(); ++b) {
      if (count[a][b] == 0) continue;
      std::snprintf(line, sizeof line, "%s,%s,%.6f,%d\n", names[a].c_str(), names[b].c_str(), score[a][b],
                    count[a][b]);
      out += line;
    }
  }
  return out;
}

std::string EvalReport::elo_csv() const {
  std::string out = "agent,elo\n";
  char line[256];
  for (const std::string& n : names) {
    std::snprintf(line, sizeof line, "%s,%.4f\n", n.c_str(), elo.rating(n));
    out += line;
  }
  return out;
}

EvalReport evaluate_pool(const std::vector<Agent>& agents, const EvalSplit& split, const EvalOptions& opts,
                         const MatchRunner& runner) {
  HELT_EXPECT(agents.size() >= 2, "evaluate_pool: need at least two agents");
  HELT_EXPECT(!split.challenger_chars.empty() && !split.opponent_chars.empty(), "evaluate_pool: empty character split");
  HELT_EXPECT(opts.matches_per_pair > 0, "evaluate_pool: matches_per_pair must be > 0");
  const int n = static_cast<int>(agents.size());
  EvalReport rep;
  for (const Agent& a : agents) rep.names.push_back(a.name);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int m = 0; m < opts.matches_per_pair; ++m) {
        EvalMatch em;
        em.index = static_cast<int>(rep.matches.size());
        em.seed = derive_seed(opts.seed, em.index);
        const bool swapped = opts.swap_roles && m % 2 == 1;
        em.challenger = swapped ? b : a;
        em.opponent = swapped ? a : b;
        const int side_turn = opts.swap_roles ? m / 2 : m;
        em.challenger_side = side_turn % 2 == 0 ? game::Side::kA : game::Side::kB;
        Rng crng(derive_seed(em.seed, 1));
        em.challenger_char = split.challenger_chars[std::uniform_int_distribution<std::size_t>(
            0, split.challenger_chars.size() - 1)(crng)].char_id;
        em.opponent_char = split.opponent_chars[std::uniform_int_distribution<std::size_t>(
            0, split.opponent_chars.size() - 1)(crng)].char_id;
        rep.matches.push_back(em);
      }
    }
  }
  auto find_char = [](const std::vector<game::CharacterSpec>& v, int id) -> const game::CharacterSpec& {
    for (const auto& c : v) {
      if (c.char_id == id) return c;
    }
    throw ContractViolation("evaluate_pool: unknown character");
  };
  const MatchRunner run = runner ? runner : MatchRunner([&](const EvalMatch& m, const game::CharacterSpec& a,
                                                            const game::CharacterSpec& b, BehaviorLog* log) {
    std::unique_ptr<learn::Policy> pc = agents[m.challenger].make();
    std::unique_ptr<learn::Policy> po = agents[m.opponent].make();
    learn::Policy& pa = m.challenger_side == game::Side::kA ? *pc : *po;
    learn::Policy& pb = m.challenger_side == game::Side::kA ? *po : *pc;
    return play_match(a, b, pa, pb, opts.env, derive_seed(m.seed, 3), log);
  });

  if (opts.keep_logs) rep.logs.resize(rep.matches.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t k = begin; k < rep.matches.size(); k += stride) {
      EvalMatch& m = rep.matches[k];
      const game::CharacterSpec& cc = find_char(split.challenger_chars, m.challenger_char);
      const game::CharacterSpec& oc = find_char(split.opponent_chars, m.opponent_char);
      const bool ca = m.challenger_side == game::Side::kA;
      const MatchResult r = run(m, ca ? cc : oc, ca ? oc : cc, opts.keep_logs ? &rep.logs[k] : nullptr);
      m.outcome = r.outcome;
      m.frames = r.frames;
    }
  };
  const int workers = std::max(1, opts.workers);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work, w, workers);
    for (std::thread& t : threads) t.join();
  }

  rep.score.assign(n, std::vector<double>(n, 0.0));
  rep.count.assign(n, std::vector<int>(n, 0));
  for (const EvalMatch& m : rep.matches) {
    const double s = m.challenger_score();
    rep.score[m.challenger][m.opponent] += s;
    rep.score[m.opponent][m.challenger] += 1.0 - s;
    rep.count[m.challenger][m.opponent] += 1;
    rep.count[m.opponent][m.challenger] += 1;
    const bool ca = m.challenger_side == game::Side::kA;
    rep.elo.record(rep.names[ca ? m.challenger : m.opponent], rep.names[ca ? m.opponent : m.challenger], m.outcome);
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (rep.count[a][b] > 0) rep.score[a][b] /= rep.count[a][b];
    }
  }
  return rep;
}

GeneralizationReport evaluate_generalization(const Agent& agent, const std::vector<Agent>& opponents,
                                             const std::vector<game::CharacterSpec>& familiar,
                                             const std::vector<game::CharacterSpec>& held_out,
                                             const EvalOptions& opts) {
  if (held_out.empty()) throw ConfigError("eval generalization: the pool has no held-out characters");
  HELT_EXPECT(!familiar.empty(), "eval generalization: no familiar characters");
  HELT_EXPECT(!opponents.empty(), "eval generalization: no opponents");
  GeneralizationReport rep;
  rep.matches_per_opponent = opts.matches_per_pair;
  std::array<double, 2> pooled{};
  for (std::size_t o = 0; o < opponents.size(); ++o) {
    rep.opponents.push_back(opponents[o].name);
    for (int split = 0; split < 2; ++split) {
      EvalOptions eo = opts;
      eo.swap_roles = false;
      eo.seed = derive_seed(opts.seed, 2 * o + split);
      const EvalSplit sp{familiar, split == 0 ? familiar : held_out};
      const double score = evaluate_pool({agent, opponents[o]}, sp, eo).score[0][1];
      (split == 0 ? rep.familiar_score : rep.held_out_score).push_back(score);
      pooled[split] += score / static_cast<double>(opponents.size());
    }
  }
  const int n = opts.matches_per_pair * static_cast<int>(opponents.size());
  rep.familiar_rating = performance_rating(pooled[0], n);
  rep.held_out_rating = performance_rating(pooled[1], n);
  return rep;
}

std::string GeneralizationReport::csv() const {
  std::string out = "split,opponent,score,matches\n";
  char line[256];
  for (std::size_t o = 0; o < opponents.size(); ++o) {
    std::snprintf(line, sizeof line, "familiar,%s,%.6f,%d\n", opponents[o].c_str(), familiar_score[o],
                  matches_per_opponent);
    out += line;
    std::snprintf(line, sizeof line, "held_out,%s,%.6f,%d\n", opponents[o].c_str(), held_out_score[o],
                  matches_per_opponent);
    out += line;
  }
  std::snprintf(line, sizeof line, "rating,familiar,%.4f,\nrating,held_out,%.4f,\nrating,drop,%.4f,\n",
                familiar_rating, held_out_rating, rating_drop());
  out += line;
  return out;
}

}  // namespace helt::eval
