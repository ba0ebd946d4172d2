#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "helt/encoders/encoder.hpp"
#include "helt/game/reward.hpp"
#include "helt/learn/policy.hpp"
#include "helt/learn/ppo.hpp"

namespace helt::learn {

struct EnvConfig {
  int horizon = 1800;
  int frame_skip = 4;  // frames per agent decision
  game::ArenaConfig arena;

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

void validate(const EnvConfig& cfg);

// What the learner plays next: characters (with their indices in the
// training subset) and an opponent.
struct MatchSetup {
  game::CharacterSpec learner_char;
  game::CharacterSpec opp_char;
  int learner_index = 0;
  int opp_index = 0;
  std::string opponent_key;
  std::unique_ptr<Policy> opponent;
};

struct EpisodeRecord {
  std::string opponent_key;
  int learner_index = 0;
  int opp_index = 0;
  game::Side learner_side = game::Side::kA;
  game::Outcome outcome = game::Outcome::kDraw;
  int frames = 0;
  double episode_return = 0.0;

  bool learner_won() const;
  // 1 win, 0.5 draw, 0 loss.
  double learner_score() const;
};

double score_for(game::Outcome outcome, game::Side side);

// Vectorized self-contained rollout workers for one learner. Environments
// persist between collect() calls; unfinished episodes carry over.
class RolloutCollector {
 public:
  using MatchFactory = std::function<MatchSetup(Rng&)>;

  RolloutCollector(EnvConfig env, enc::IdTable ids, game::StyleReward style, int num_envs, std::uint64_t seed);

  struct Result {
    std::vector<Trajectory> trajectories;
    std::vector<EpisodeRecord> episodes;
    std::int64_t steps = 0;
  };

  // Runs until at least `steps` learner decisions have been recorded.
  Result collect(const PolicyParams& params, std::int64_t steps, int fragment_length, const MatchFactory& factory);

  // Drops all running episodes; the next collect() starts fresh matches.
  void restart();

 private:
  struct Env {
    bool running = false;
    game::GameState state;
    game::Side side = game::Side::kA;
    MatchSetup setup;
    Rng rng;
    Trajectory fragment;
    bool needs_bootstrap = false;
    double episode_return = 0.0;
  };

  void start_match(Env& env, const MatchFactory& factory);

  EnvConfig env_;
  enc::IdTable ids_;
  game::StyleReward style_;
  std::vector<Env> envs_;
};

}  // namespace helt::learn
