#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "helt/eval/behavior.hpp"

namespace helt::harness {

// One matchlog.jsonl record.
struct LoggedMatch {
  int match = 0;
  std::array<std::string, 2> agents;  // side A, side B
  eval::BehaviorLog log;
};

std::string matchlog_line(const LoggedMatch& m);
std::vector<LoggedMatch> read_matchlog(const std::string& path);

// Behavior scores keyed by agent name, one entry per (match, side).
std::map<std::string, std::vector<eval::BehaviorScores>> behavior_populations(const std::vector<LoggedMatch>& matches,
                                                                              const eval::BehaviorConfig& cfg = {});

// Per (match, side) rows: match,agent,side,char_id,<metrics>.
std::string behavior_csv(const std::vector<LoggedMatch>& matches, const eval::BehaviorConfig& cfg = {});
// population,metric,mean,n.
std::string behavior_summary_csv(const std::map<std::string, std::vector<eval::BehaviorScores>>& populations);

}  // namespace helt::harness
