#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "helt/game/character.hpp"
#include "helt/game/reward.hpp"
#include "helt/league/driver.hpp"
#include "helt/learn/ppo.hpp"
#include "helt/learn/rollout.hpp"

namespace helt::harness {

inline constexpr const char* kOutputDirEnv = "HELT_OUTPUT_DIR";

struct PoolConfig {
  std::string file;  // empty: generated pool
  int per_level = 3;
  std::uint64_t seed = 7;

  friend bool operator==(const PoolConfig&, const PoolConfig&) = default;
};

struct SubsetConfig {
  int size = 6;
  // Explicit per-level counts (S, A, B, C); all -1 derives them from `size`
  // with the 15/15/10/10 pattern.
  std::array<int, 4> per_level{-1, -1, -1, -1};

  friend bool operator==(const SubsetConfig&, const SubsetConfig&) = default;
};

struct EvalSchedule {
  int final_matches = 100;  // per bot, main agent only; 0 disables
  bool greedy = true;
  int log_matches = 50;  // per bot, written to matchlog.jsonl

  friend bool operator==(const EvalSchedule&, const EvalSchedule&) = default;
};

struct RunConfig {
  std::string profile = "desk";
  std::uint64_t seed = 7;
  bool deterministic = true;
  int workers = 1;
  learn::EnvConfig env;
  learn::LearnerConfig learner;
  league::LeagueConfig league;
  league::MatchupConfig matchup;
  std::array<game::StyleReward, 3> styles{};  // per role
  PoolConfig pool;
  SubsetConfig subset;
  EvalSchedule eval;
  std::string output_dir = "runs/default";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Profiles: "desk" (defaults) and "paper" (paper batch sizes and a larger
// iteration budget).
RunConfig profile_defaults(const std::string& profile);

// Throws ConfigError naming the offending field.
void validate(const RunConfig& cfg);

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& cfg);

// SHA-256 of the canonical dump.
std::string config_hash(const RunConfig& cfg);

// Largest-remainder split of `total` over the 15/15/10/10 level pattern.
std::array<int, 4> level_counts(int total);

std::vector<game::CharacterSpec> load_pool(const RunConfig& cfg);
// First characters of each level by id, in pool order.
std::vector<game::CharacterSpec> select_subset(const std::vector<game::CharacterSpec>& pool, const SubsetConfig& cfg);
std::vector<game::CharacterSpec> held_out(const std::vector<game::CharacterSpec>& pool,
                                          const std::vector<game::CharacterSpec>& subset);

// Output directory with the environment override applied.
std::string resolve_output_dir(const RunConfig& cfg);

}  // namespace helt::harness
