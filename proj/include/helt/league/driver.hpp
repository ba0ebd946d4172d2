#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "helt/eval/elo.hpp"
#include "helt/game/character.hpp"
#include "helt/game/reward.hpp"
#include "helt/league/league.hpp"
#include "helt/learn/ppo.hpp"
#include "helt/learn/rollout.hpp"
#include "helt/matchup/regret_matching.hpp"

namespace helt::league {

struct MatchRecord {
  std::string opponent_key;
  int learner_index = 0;  // j
  int opp_index = 0;      // i
  double score = 0.5;     // learner's: 1 win, 0.5 draw, 0 loss
  int frames = 0;
};

struct PhaseReport {
  std::int64_t steps = 0;
  std::vector<MatchRecord> matches;
  learn::TrainStats stats;
  ParamsPtr params;  // published after the phase; may be null
};

// Produces experience and parameter updates for one member. run_phase()
// may be called concurrently for different roles; it must only read the
// league and the matchup state.
class PhaseSource {
 public:
  virtual ~PhaseSource() = default;
  virtual ParamsPtr initial_params(Role role, enc::EncoderMode mode) = 0;
  virtual PhaseReport run_phase(const League& league, Role role, const matchup::MatchupState& matchup,
                                std::uint64_t seed) = 0;
  // target == nullptr requests a fresh initialization; returns what the
  // member now plays with.
  virtual ParamsPtr on_reset(Role role, ParamsPtr target) = 0;
};

struct MatchupConfig {
  double gamma = 0.99;
  double eta = 0.1;
  friend bool operator==(const MatchupConfig&, const MatchupConfig&) = default;
};

struct DriverConfig {
  LeagueConfig league;
  MatchupConfig matchup;
  int num_characters = 1;  // training subset size
  std::uint64_t seed = 0;
  int workers = 1;
  bool deterministic = true;
};

struct MetricsRow {
  int iteration = 0;
  Role role = Role::kMain;
  int generation = 0;
  std::int64_t steps = 0;
  double elo = 0.0;
  double min_winrate = -1.0;  // -1 until every candidate pair has enough matches
  int resets = 0;
  int pool_size = 0;
  int episodes = 0;
  double train_score = 0.0;
  double mean_frames = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

std::string metrics_header();
std::string metrics_line(const MetricsRow& row);
std::string events_csv(const std::vector<LeagueEvent>& events);

struct LeagueRun {
  League league;
  std::array<matchup::MatchupState, 3> matchups;
  eval::EloTable elo;
  std::vector<MetricsRow> metrics;
};

using IterationCallback = std::function<void(const LeagueRun&, int iteration)>;

// Runs config.league.total_iterations iterations. An iteration ends once
// every member has taken a snapshot.
LeagueRun run_league(const DriverConfig& cfg, PhaseSource& source, const IterationCallback& on_iteration = {});

// Real training: PPO learners fed by vectorized rollouts.
struct PpoSourceConfig {
  learn::EnvConfig env;
  learn::LearnerConfig learner;
  std::vector<game::CharacterSpec> subset;
  enc::IdTable ids;
  std::array<game::StyleReward, 3> styles{};
  std::uint64_t seed = 0;
};

class PpoSource : public PhaseSource {
 public:
  explicit PpoSource(PpoSourceConfig cfg);
  ParamsPtr initial_params(Role role, enc::EncoderMode mode) override;
  PhaseReport run_phase(const League& league, Role role, const matchup::MatchupState& matchup,
                        std::uint64_t seed) override;
  ParamsPtr on_reset(Role role, ParamsPtr target) override;

 private:
  struct Slot {
    std::unique_ptr<learn::Learner> learner;
    std::unique_ptr<learn::RolloutCollector> collector;
    learn::NetSpec spec;
    int fresh_inits = 0;
  };
  learn::PolicyParams fresh(Role role, int salt) const;

  PpoSourceConfig cfg_;
  std::array<Slot, 3> slots_;
};

// Scripted source with injected match outcomes and no learning.
class ScriptedSource : public PhaseSource {
 public:
  using OutcomeFn = std::function<double(const League&, Role, const Candidate&, Rng&)>;

  ScriptedSource(OutcomeFn outcome, int matches_per_phase, int steps_per_match);
  ParamsPtr initial_params(Role role, enc::EncoderMode mode) override;
  PhaseReport run_phase(const League& league, Role role, const matchup::MatchupState& matchup,
                        std::uint64_t seed) override;
  ParamsPtr on_reset(Role role, ParamsPtr target) override;

 private:
  OutcomeFn outcome_;
  int matches_per_phase_;
  int steps_per_match_;
};

}  // namespace helt::league
