#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "helt/core/random.hpp"
#include "helt/encoders/encoder.hpp"
#include "helt/league/pfsp.hpp"
#include "helt/learn/network.hpp"

namespace helt::league {

enum class Role : std::uint8_t { kMain, kMainExploiter, kLeagueExploiter };
inline constexpr std::array<Role, 3> kRoles{Role::kMain, Role::kMainExploiter, Role::kLeagueExploiter};
inline constexpr int ridx(Role r) { return static_cast<int>(r); }

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

struct LeagueConfig {
  double win_threshold = 0.8;
  std::int64_t iteration_timeout_steps = 20000;
  int total_iterations = 10;
  double league_exploiter_reset_prob = 0.25;
  double p_hard = 2.0;
  int reset_grace_iterations = 3;
  int reset_lookback = 3;
  int min_matches = 20;
  double winrate_smoothing = 0.99;
  Weighting main_weighting = Weighting::kHard;
  Weighting main_exploiter_weighting = Weighting::kVar;
  Weighting league_exploiter_weighting = Weighting::kHard;
  enc::EncoderMode main_mode = enc::EncoderMode::kQS;
  // Ablation switch: permits an FIS main agent.
  bool allow_fis_main = false;

  friend bool operator==(const LeagueConfig&, const LeagueConfig&) = default;
};

void validate(const LeagueConfig& cfg);

enc::EncoderMode mode_for(Role role, const LeagueConfig& cfg);

using ParamsPtr = std::shared_ptr<const learn::PolicyParams>;

struct PolicySnapshot {
  int id = 0;
  Role role = Role::kMain;
  int generation = 0;
  std::int64_t created_step = 0;
  enc::EncoderMode mode = enc::EncoderMode::kQS;
  ParamsPtr params;  // null in scripted runs

  std::string key() const { return "snap:" + std::to_string(id); }
};

struct LeagueMember {
  Role role = Role::kMain;
  enc::EncoderMode mode = enc::EncoderMode::kQS;
  ParamsPtr params;
  std::int64_t steps_in_iteration = 0;
  std::int64_t total_steps = 0;
  int generation = 1;  // generation currently in training
  int resets = 0;

  std::string key() const { return live_key(role); }
  static std::string live_key(Role role) { return "live:" + std::string(to_string(role)); }
};

struct Candidate {
  std::string key;
  std::optional<int> snapshot;  // pool index
  std::optional<Role> live;
  Weighting weighting = Weighting::kHard;
};

struct LeagueEvent {
  enum class Kind : std::uint8_t { kSnapshot, kReset };
  int iteration = 0;
  Role role = Role::kMain;
  Kind kind = Kind::kSnapshot;
  int snapshot_id = -1;  // snapshot taken, or reset target (-1: fresh init)
  int generation = 0;    // generation of the snapshot taken / reset from
  std::int64_t member_steps = 0;
  std::string reason;    // snapshot: "threshold" | "timeout"; reset: "always" | "random" | "fresh"
  double min_winrate = 0.0;

  friend bool operator==(const LeagueEvent&, const LeagueEvent&) = default;
};

std::string_view to_string(LeagueEvent::Kind kind);

struct SnapshotResult {
  int snapshot_id = 0;
  bool reset = false;
  std::optional<int> reset_target;  // pool index; empty with reset = fresh init
  double min_winrate = -1.0;
};

// Pool, members, win-rate table and the snapshot/reset rules. Single owner;
// readers may share a const reference while no mutation is in flight.
class League {
 public:
  League(LeagueConfig cfg, std::array<LeagueMember, 3> members);

  // Adds a generation-0 snapshot of every member.
  void bootstrap();

  const LeagueConfig& config() const { return cfg_; }
  const LeagueMember& member(Role role) const { return members_[ridx(role)]; }
  LeagueMember& member(Role role) { return members_[ridx(role)]; }
  const std::vector<PolicySnapshot>& pool() const { return pool_; }
  const WinRateTable& table() const { return table_; }
  const std::vector<LeagueEvent>& events() const { return events_; }

  std::vector<Candidate> candidates(Role role) const;
  std::vector<double> candidate_winrates(Role role, const std::vector<Candidate>& cands) const;
  Candidate sample_opponent(Role role, Rng& rng) const;
  ParamsPtr params_for(const Candidate& c) const;

  void record_match(Role role, const std::string& opponent_key, double score);
  void add_steps(Role role, std::int64_t steps);

  // Minimum win rate over the candidate set, or nullopt if some pair has
  // fewer than min_matches results.
  std::optional<double> min_winrate(Role role) const;
  bool should_snapshot(Role role) const;
  SnapshotResult on_snapshot(Role role, Rng& rng, int iteration);

  // Installs the parameters the member was reset to.
  void set_params(Role role, ParamsPtr params) { members_[ridx(role)].params = std::move(params); }

 private:
  int publish(Role role);

  LeagueConfig cfg_;
  std::array<LeagueMember, 3> members_;
  std::vector<PolicySnapshot> pool_;
  WinRateTable table_;
  std::vector<LeagueEvent> events_;
};

}  // namespace helt::league
