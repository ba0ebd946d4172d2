#include "helt/harness/run.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>

#include <json.hpp>

#include "helt/core/error.hpp"
#include "helt/harness/checkpoint.hpp"
#include "helt/harness/io.hpp"
#include "helt/harness/report.hpp"

namespace helt::harness {
namespace {

using league::Role;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::uint64_t kEvalSalt = 0x6576616cULL;

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::vector<int> char_ids(const std::vector<game::CharacterSpec>& chars) {
  std::vector<int> ids;
  for (const game::CharacterSpec& c : chars) ids.push_back(c.char_id);
  return ids;
}

json league_manifest(const league::LeagueRun& run, const std::string& config_hash) {
  json snaps = json::array();
  for (const league::PolicySnapshot& s : run.league.pool()) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshots/snap_%04d.json", s.id);
    snaps.push_back({{"id", s.id},
                     {"role", std::string(league::to_string(s.role))},
                     {"generation", s.generation},
                     {"created_step", s.created_step},
                     {"mode", std::string(enc::to_string(s.mode))},
                     {"elo", run.elo.rating(s.key())},
                     {"file", name}});
  }
  json members = json::array();
  for (Role r : league::kRoles) {
    const league::LeagueMember& m = run.league.member(r);
    members.push_back({{"role", std::string(league::to_string(r))},
                       {"mode", std::string(enc::to_string(m.mode))},
                       {"generation", m.generation},
                       {"resets", m.resets},
                       {"total_steps", m.total_steps},
                       {"elo", run.elo.rating(m.key())},
                       {"file", "final/" + std::string(league::to_string(r)) + ".json"}});
  }
  json winrates = json::array();
  for (const auto& [key, e] : run.league.table().entries()) {
    winrates.push_back({{"player", key.first},
                        {"opponent", key.second},
                        {"winrate", run.league.table().winrate(key.first, key.second)},
                        {"matches", e.matches}});
  }
  return {{"config_hash", config_hash}, {"snapshots", snaps}, {"members", members}, {"winrates", winrates}};
}

}  // namespace

RunContext make_context(const RunConfig& cfg) { return make_context(cfg, load_pool(cfg)); }

RunContext make_context(const RunConfig& cfg, std::vector<game::CharacterSpec> pool) {
  validate(cfg);
  RunContext ctx;
  ctx.cfg = cfg;
  ctx.pool = std::move(pool);
  ctx.subset = select_subset(ctx.pool, cfg.subset);
  ctx.ids = enc::IdTable(char_ids(ctx.subset));
  return ctx;
}

league::PpoSourceConfig source_config(const RunContext& ctx) {
  league::PpoSourceConfig pc;
  pc.env = ctx.cfg.env;
  pc.learner = ctx.cfg.learner;
  pc.subset = ctx.subset;
  pc.ids = ctx.ids;
  pc.styles = ctx.cfg.styles;
  pc.seed = derive_seed(ctx.cfg.seed, 0x707063ULL);
  return pc;
}

league::DriverConfig driver_config(const RunContext& ctx) {
  league::DriverConfig dc;
  dc.league = ctx.cfg.league;
  dc.matchup = ctx.cfg.matchup;
  dc.num_characters = static_cast<int>(ctx.subset.size());
  dc.seed = ctx.cfg.seed;
  dc.workers = ctx.cfg.workers;
  dc.deterministic = ctx.cfg.deterministic;
  return dc;
}

std::string bot_results_csv(const std::vector<BotResult>& results) {
  std::string out = "bot,matches,score,wins,draws,losses,mean_frames\n";
  char line[256];
  for (const BotResult& r : results) {
    std::snprintf(line, sizeof line, "%s,%d,%.6f,%d,%d,%d,%.2f\n", r.bot.c_str(), r.matches, r.score, r.wins,
                  r.draws, r.losses, r.mean_frames);
    out += line;
  }
  return out;
}

eval::Agent member_agent(const RunContext& ctx, Role role, league::ParamsPtr params, bool greedy) {
  HELT_EXPECT(params != nullptr, "member_agent: missing parameters");
  return eval::neural_agent(std::string(league::to_string(role)), std::move(params), ctx.ids, ctx.cfg.env.frame_skip,
                            greedy);
}

std::vector<BotResult> evaluate_vs_bots(const eval::Agent& agent, const RunContext& ctx, int matches,
                                        std::uint64_t seed, int workers, int log_matches,
                                        std::vector<std::string>* log_lines) {
  const int fs = ctx.cfg.env.frame_skip;
  const std::array<eval::Agent, 2> bots{eval::random_agent(fs), eval::scripted_agent(fs)};
  std::vector<BotResult> out;
  for (std::size_t b = 0; b < bots.size(); ++b) {
    eval::EvalOptions eo;
    eo.matches_per_pair = matches;
    eo.swap_roles = false;
    eo.env = ctx.cfg.env;
    eo.seed = derive_seed(seed, b);
    eo.workers = workers;
    eo.keep_logs = log_lines != nullptr && log_matches > 0;
    const eval::EvalReport rep = eval::evaluate_pool({agent, bots[b]}, {ctx.subset, ctx.subset}, eo);
    BotResult r;
    r.bot = bots[b].name;
    r.matches = static_cast<int>(rep.matches.size());
    r.score = rep.score[0][1];
    double frames = 0.0;
    for (const eval::EvalMatch& m : rep.matches) {
      const double s = m.challenger_score();
      r.wins += s == 1.0;
      r.draws += s == 0.5;
      r.losses += s == 0.0;
      frames += m.frames;
    }
    r.mean_frames = frames / std::max(1, r.matches);
    out.push_back(r);
    if (!eo.keep_logs) continue;
    for (int k = 0; k < std::min(log_matches, r.matches); ++k) {
      const eval::EvalMatch& m = rep.matches[k];
      const bool ca = m.challenger_side == game::Side::kA;
      LoggedMatch lm;
      lm.match = k;
      lm.agents = {ca ? agent.name : bots[b].name, ca ? bots[b].name : agent.name};
      lm.log = rep.logs[k];
      log_lines->push_back(matchlog_line(lm));
    }
  }
  return out;
}

TrainingResult run_training(const RunConfig& cfg, const std::string& dir, std::ostream* progress) {
  const RunContext ctx = make_context(cfg);
  const std::string hash = config_hash(cfg);
  fs::create_directories(dir);
  write_file_atomic(join(dir, "config.json"), dump_config(cfg));
  write_file_atomic(join(dir, "pool.json"), game::pool_to_json(ctx.pool));

  league::PpoSource source(source_config(ctx));
  const league::DriverConfig dc = driver_config(ctx);
  auto metrics_csv = [](const league::LeagueRun& run) {
    std::string out = league::metrics_header();
    for (const league::MetricsRow& row : run.metrics) out += league::metrics_line(row);
    return out;
  };
  TrainingResult res{league::run_league(dc, source, [&](const league::LeagueRun& run, int it) {
    write_file_atomic(join(dir, "metrics.csv"), metrics_csv(run));
    if (!progress) return;
    for (const league::MetricsRow& row : run.metrics) {
      if (row.iteration == it) *progress << league::metrics_line(row);
    }
    progress->flush();
  }), {}};
  const league::LeagueRun& run = res.run;

  write_file_atomic(join(dir, "metrics.csv"), metrics_csv(run));
  write_file_atomic(join(dir, "events.csv"), league::events_csv(run.league.events()));
  for (Role r : league::kRoles) {
    write_file_atomic(join(dir, "matchup_" + std::string(league::to_string(r)) + ".csv"),
                      matchup::to_csv(run.matchups[league::ridx(r)]));
  }
  for (const league::PolicySnapshot& s : run.league.pool()) {
    if (s.params) save_snapshot(s, join(dir, "snapshots"));
  }
  for (Role r : league::kRoles) {
    const league::LeagueMember& m = run.league.member(r);
    league::PolicySnapshot live;
    live.id = -1;
    live.role = r;
    live.generation = m.generation;
    live.created_step = m.total_steps;
    live.mode = m.mode;
    live.params = m.params;
    save_snapshot(live, join(dir, "final"), std::string(league::to_string(r)));
  }
  write_file_atomic(join(dir, "league_manifest.json"), league_manifest(run, hash).dump(2) + "\n");

  if (cfg.eval.final_matches > 0) {
    std::vector<std::string> lines;
    const eval::Agent main = member_agent(ctx, Role::kMain, run.league.member(Role::kMain).params, cfg.eval.greedy);
    res.final_eval = evaluate_vs_bots(main, ctx, cfg.eval.final_matches, derive_seed(cfg.seed, kEvalSalt),
                                      cfg.deterministic ? 1 : cfg.workers, cfg.eval.log_matches, &lines);
    write_file_atomic(join(dir, "final_eval.csv"), bot_results_csv(res.final_eval));
    std::string jsonl;
    for (const std::string& l : lines) jsonl += l + "\n";
    write_file_atomic(join(dir, "matchlog.jsonl"), jsonl);
  }

  json files = json::object();
  for (const char* name : {"config.json", "pool.json", "metrics.csv", "events.csv", "league_manifest.json"}) {
    files[name] = sha256_hex(read_file(join(dir, name)));
  }
  const json manifest{{"command", "league run"},
                      {"config_hash", hash},
                      {"seed", cfg.seed},
                      {"deterministic", cfg.deterministic},
                      {"profile", cfg.profile},
                      {"files", files}};
  write_file_atomic(join(dir, "run_manifest.json"), manifest.dump(2) + "\n");
  return res;
}

LoadedRun load_run(const std::string& dir) {
  if (!fs::exists(join(dir, "run_manifest.json"))) {
    throw ConfigError("run: '" + dir + "' is not a finished run directory (no run_manifest.json)");
  }
  const RunConfig cfg = load_config(join(dir, "config.json"));
  LoadedRun out;
  out.ctx = make_context(cfg, game::load_pool(join(dir, "pool.json")));
  for (Role r : league::kRoles) {
    out.final_params[league::ridx(r)] = load_snapshot(join(dir, "final/" + std::string(league::to_string(r)) + ".json")).params;
  }
  return out;
}

}  // namespace helt::harness
