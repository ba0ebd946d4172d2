#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "helt/eval/behavior.hpp"
#include "helt/eval/elo.hpp"
#include "helt/learn/policy.hpp"
#include "helt/learn/rollout.hpp"

namespace helt::eval {

struct MatchResult {
  game::Outcome outcome = game::Outcome::kDraw;
  int frames = 0;
  std::array<int, 2> hp{};
};

// Plays one match to the end; both policies are asked for an action on
// every frame.
MatchResult play_match(const game::CharacterSpec& a, const game::CharacterSpec& b, learn::Policy& pa,
                       learn::Policy& pb, const learn::EnvConfig& env, std::uint64_t seed,
                       BehaviorLog* log = nullptr);

struct Agent {
  std::string name;
  std::function<std::unique_ptr<learn::Policy>()> make;
};

// Agents act every `frame_skip` frames, like the learners during training.
Agent neural_agent(std::string name, std::shared_ptr<const learn::PolicyParams> params, enc::IdTable ids,
                   int frame_skip, bool greedy = false);
Agent random_agent(int frame_skip);
Agent scripted_agent(int frame_skip);

struct EvalSplit {
  std::vector<game::CharacterSpec> challenger_chars;
  std::vector<game::CharacterSpec> opponent_chars;
};

struct EvalMatch {
  int index = 0;
  int challenger = 0;  // agent index
  int opponent = 0;
  int challenger_char = 0;  // char ids
  int opponent_char = 0;
  game::Side challenger_side = game::Side::kA;
  game::Outcome outcome = game::Outcome::kDraw;
  int frames = 0;
  std::uint64_t seed = 0;

  double challenger_score() const;
};

struct EvalOptions {
  int matches_per_pair = 10;
  // false: within a pair the lower-indexed agent is always the challenger.
  bool swap_roles = true;
  learn::EnvConfig env;
  std::uint64_t seed = 0;
  int workers = 1;
  bool keep_logs = false;
};

using MatchRunner = std::function<MatchResult(const EvalMatch&, const game::CharacterSpec& a,
                                              const game::CharacterSpec& b, BehaviorLog* log)>;

struct EvalReport {
  std::vector<std::string> names;
  std::vector<std::vector<double>> score;  // mean score of row agent against column agent
  std::vector<std::vector<int>> count;
  EloTable elo;
  std::vector<EvalMatch> matches;
  std::vector<BehaviorLog> logs;  // parallel to matches when keep_logs

  // Mean score of agent `a` over all its matches.
  double mean_score(int a) const;
  std::string matrix_csv() const;
  std::string elo_csv() const;
};

// Round robin over unordered agent pairs. Characters are drawn uniformly
// from the split; sides alternate; Elo is applied in match order.
EvalReport evaluate_pool(const std::vector<Agent>& agents, const EvalSplit& split, const EvalOptions& opts,
                         const MatchRunner& runner = {});

struct GeneralizationReport {
  std::vector<std::string> opponents;
  std::vector<double> familiar_score;  // per opponent
  std::vector<double> held_out_score;
  int matches_per_opponent = 0;
  double familiar_rating = 0.0;  // performance rating of the pooled score
  double held_out_rating = 0.0;

  double rating_drop() const { return familiar_rating - held_out_rating; }
  std::string csv() const;
};

// The agent plays `familiar` characters throughout; its opponents play
// familiar characters in one split and held-out ones in the other.
GeneralizationReport evaluate_generalization(const Agent& agent, const std::vector<Agent>& opponents,
                                             const std::vector<game::CharacterSpec>& familiar,
                                             const std::vector<game::CharacterSpec>& held_out,
                                             const EvalOptions& opts);

}  // namespace helt::eval
