#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "helt/encoders/encoder.hpp"
#include "helt/eval/match.hpp"
#include "helt/harness/config.hpp"
#include "helt/league/driver.hpp"

namespace helt::harness {

struct RunContext {
  RunConfig cfg;
  std::vector<game::CharacterSpec> pool;
  std::vector<game::CharacterSpec> subset;
  enc::IdTable ids;
};

RunContext make_context(const RunConfig& cfg);
RunContext make_context(const RunConfig& cfg, std::vector<game::CharacterSpec> pool);

league::PpoSourceConfig source_config(const RunContext& ctx);
league::DriverConfig driver_config(const RunContext& ctx);

struct BotResult {
  std::string bot;
  int matches = 0;
  double score = 0.0;
  int wins = 0;
  int draws = 0;
  int losses = 0;
  double mean_frames = 0.0;
};

std::string bot_results_csv(const std::vector<BotResult>& results);

// Agent against the random and scripted bots on the training subset; the
// agent is always the challenger, sides alternate. Logs of the first
// `log_matches` matches per bot are appended to `log_lines` as JSON.
std::vector<BotResult> evaluate_vs_bots(const eval::Agent& agent, const RunContext& ctx, int matches,
                                        std::uint64_t seed, int workers, int log_matches = 0,
                                        std::vector<std::string>* log_lines = nullptr);

eval::Agent member_agent(const RunContext& ctx, league::Role role, league::ParamsPtr params, bool greedy);

struct TrainingResult {
  league::LeagueRun run;
  std::vector<BotResult> final_eval;
};

// Runs the league and writes every artifact into `dir`: config.json,
// pool.json, metrics.csv, events.csv, matchup_<role>.csv,
// league_manifest.json, snapshots/, final/, final_eval.csv, matchlog.jsonl
// and run_manifest.json (written last).
TrainingResult run_training(const RunConfig& cfg, const std::string& dir, std::ostream* progress = nullptr);

struct LoadedRun {
  RunContext ctx;
  std::array<league::ParamsPtr, 3> final_params;
};

LoadedRun load_run(const std::string& dir);

}  // namespace helt::harness
