#include "helt/harness/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "helt/core/error.hpp"
#include "helt/harness/io.hpp"

namespace helt::harness {

using nlohmann::json;

std::string matchlog_line(const LoggedMatch& m) {
  const json line{{"match", m.match}, {"agents", m.agents}, {"log", json::parse(eval::log_to_json(m.log))}};
  return line.dump();
}

std::vector<LoggedMatch> read_matchlog(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<LoggedMatch> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      LoggedMatch m;
      m.match = j.at("match").get<int>();
      m.agents = j.at("agents").get<std::array<std::string, 2>>();
      m.log = eval::log_from_json(j.at("log").dump());
      out.push_back(std::move(m));
    } catch (const json::exception& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::map<std::string, std::vector<eval::BehaviorScores>> behavior_populations(const std::vector<LoggedMatch>& matches,
                                                                              const eval::BehaviorConfig& cfg) {
  std::map<std::string, std::vector<eval::BehaviorScores>> out;
  for (const LoggedMatch& m : matches) {
    for (int s = 0; s < 2; ++s) {
      out[m.agents[s]].push_back(eval::behavior_scores(m.log, static_cast<game::Side>(s), cfg));
    }
  }
  return out;
}

std::string behavior_csv(const std::vector<LoggedMatch>& matches, const eval::BehaviorConfig& cfg) {
  std::string out = "match,agent,side,char_id";
  for (const char* name : eval::kMetricNames) out += std::string(",") + name;
  out += "\n";
  char buf[64];
  for (const LoggedMatch& m : matches) {
    for (int s = 0; s < 2; ++s) {
      const eval::BehaviorScores sc = eval::behavior_scores(m.log, static_cast<game::Side>(s), cfg);
      out += std::to_string(m.match) + "," + m.agents[s] + "," + (s == 0 ? "A" : "B") + "," +
             std::to_string(m.log.char_ids[s]);
      for (int k = 0; k < static_cast<int>(eval::kMetricNames.size()); ++k) {
        std::snprintf(buf, sizeof buf, ",%.6f", eval::metric(sc, k));
        out += buf;
      }
      out += "\n";
    }
  }
  return out;
}

std::string behavior_summary_csv(const std::map<std::string, std::vector<eval::BehaviorScores>>& populations) {
  std::string out = "population,metric,mean,n\n";
  char buf[256];
  for (const auto& [name, scores] : populations) {
    for (int k = 0; k < static_cast<int>(eval::kMetricNames.size()); ++k) {
      double total = 0.0;
      for (const eval::BehaviorScores& s : scores) total += eval::metric(s, k);
      std::snprintf(buf, sizeof buf, "%s,%s,%.6f,%zu\n", name.c_str(), eval::kMetricNames[k],
                    scores.empty() ? 0.0 : total / scores.size(), scores.size());
      out += buf;
    }
  }
  return out;
}

}  // namespace helt::harness
