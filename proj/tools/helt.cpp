#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "helt/core/error.hpp"
#include "helt/eval/match.hpp"
#include "helt/game/character.hpp"
#include "helt/harness/config.hpp"
#include "helt/harness/io.hpp"
#include "helt/harness/report.hpp"
#include "helt/harness/run.hpp"

namespace {

namespace fs = std::filesystem;
using namespace helt;
using league::Role;

std::string out_or(const std::string& out, const std::string& run_dir, const std::string& sub) {
  return out.empty() ? (fs::path(run_dir) / sub).string() : out;
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"helt: heterogeneous league training for a synthetic fighting game"};
  app.require_subcommand(1);

  // pool gen
  CLI::App* pool = app.add_subcommand("pool", "character pools");
  pool->require_subcommand(1);
  CLI::App* pool_gen = pool->add_subcommand("gen", "generate a synthetic character pool");
  int per_level = 3;
  std::uint64_t pool_seed = 7;
  std::string pool_out;
  pool_gen->add_option("--per-level", per_level, "characters per level (S, A, B, C)")->check(CLI::PositiveNumber);
  pool_gen->add_option("--seed", pool_seed, "generator seed");
  pool_gen->add_option("--out", pool_out, "output file")->required();

  // league run
  CLI::App* lg = app.add_subcommand("league", "league training");
  lg->require_subcommand(1);
  CLI::App* lg_run = lg->add_subcommand("run", "run league training");
  std::string config_path, run_out;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> iterations_override, workers_override;
  bool quiet = false;
  lg_run->add_option("--config", config_path, "run config (JSON); defaults when omitted")->check(CLI::ExistingFile);
  lg_run->add_option("--seed", seed_override, "master seed override");
  lg_run->add_option("--out", run_out, "output directory (overrides config and HELT_OUTPUT_DIR)");
  lg_run->add_option("--iterations", iterations_override, "league iterations override")->check(CLI::NonNegativeNumber);
  lg_run->add_option("--workers", workers_override, "worker threads override")->check(CLI::PositiveNumber);
  lg_run->add_flag("--quiet", quiet, "no per-iteration progress");

  // eval
  CLI::App* ev = app.add_subcommand("eval", "evaluate a finished run");
  ev->require_subcommand(1);
  std::string run_dir, eval_out;
  int matches = 0;
  std::uint64_t eval_seed = 1;
  CLI::App* ev_elo = ev->add_subcommand("elo", "round robin of the final members and the bots");
  CLI::App* ev_beh = ev->add_subcommand("behavior", "behavior scores from the run's match log");
  CLI::App* ev_gen = ev->add_subcommand("generalization", "familiar vs held-out opponent characters");
  std::string gen_role = "main";
  for (CLI::App* sc : {ev_elo, ev_beh, ev_gen}) {
    sc->add_option("--run", run_dir, "run directory")->required()->check(CLI::ExistingDirectory);
    sc->add_option("--out", eval_out, "output directory (default <run>/eval)");
  }
  for (CLI::App* sc : {ev_elo, ev_gen}) {
    sc->add_option("--matches", matches, "matches per pair")->check(CLI::PositiveNumber);
    sc->add_option("--seed", eval_seed, "evaluation seed");
  }
  ev_gen->add_option("--role", gen_role, "member to evaluate")
      ->check(CLI::IsMember({"main", "main_exploiter", "league_exploiter"}));

  // report
  CLI::App* rep = app.add_subcommand("report", "emit behavior CDF CSVs for a finished run");
  std::string report_dir, report_out;
  rep->add_option("--run", report_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  rep->add_option("--out", report_out, "output directory (default <run>/report)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (pool_gen->parsed()) {
      harness::write_file_atomic(pool_out, game::pool_to_json(game::generate_pool(per_level, pool_seed)));
      std::cout << "wrote " << pool_out << " (" << 4 * per_level << " characters)\n";
      return 0;
    }

    if (lg_run->parsed()) {
      harness::RunConfig cfg = config_path.empty() ? harness::config_from_json(nlohmann::json::object())
                                                   : harness::load_config(config_path);
      if (seed_override) cfg.seed = *seed_override;
      if (iterations_override) cfg.league.total_iterations = *iterations_override;
      if (workers_override) cfg.workers = *workers_override;
      const std::string dir = run_out.empty() ? harness::resolve_output_dir(cfg) : run_out;
      std::cout << "run " << dir << " config " << harness::config_hash(cfg).substr(0, 12) << " seed " << cfg.seed
                << "\n";
      if (!quiet) std::cout << league::metrics_header();
      const harness::TrainingResult res = harness::run_training(cfg, dir, quiet ? nullptr : &std::cout);
      for (const harness::BotResult& r : res.final_eval) {
        std::cout << "main vs " << r.bot << ": score " << r.score << " over " << r.matches << " matches\n";
      }
      return 0;
    }

    if (ev_elo->parsed()) {
      const harness::LoadedRun run = harness::load_run(run_dir);
      const int fs = run.ctx.cfg.env.frame_skip;
      std::vector<eval::Agent> agents;
      for (Role r : league::kRoles) {
        agents.push_back(harness::member_agent(run.ctx, r, run.final_params[league::ridx(r)], run.ctx.cfg.eval.greedy));
      }
      agents.push_back(eval::random_agent(fs));
      agents.push_back(eval::scripted_agent(fs));
      eval::EvalOptions eo;
      eo.matches_per_pair = matches > 0 ? matches : 20;
      eo.env = run.ctx.cfg.env;
      eo.seed = eval_seed;
      eo.workers = run.ctx.cfg.workers;
      const eval::EvalReport r = eval::evaluate_pool(agents, {run.ctx.subset, run.ctx.subset}, eo);
      const std::string out = out_or(eval_out, run_dir, "eval");
      harness::write_file_atomic(path_in(out, "elo.csv"), r.elo_csv());
      harness::write_file_atomic(path_in(out, "winrate_matrix.csv"), r.matrix_csv());
      std::cout << r.elo_csv();
      return 0;
    }

    if (ev_beh->parsed()) {
      const auto logs = harness::read_matchlog(path_in(run_dir, "matchlog.jsonl"));
      const std::string out = out_or(eval_out, run_dir, "eval");
      harness::write_file_atomic(path_in(out, "behavior.csv"), harness::behavior_csv(logs));
      const std::string summary = harness::behavior_summary_csv(harness::behavior_populations(logs));
      harness::write_file_atomic(path_in(out, "behavior_summary.csv"), summary);
      std::cout << summary;
      return 0;
    }

    if (ev_gen->parsed()) {
      const harness::LoadedRun run = harness::load_run(run_dir);
      const std::vector<game::CharacterSpec> held = harness::held_out(run.ctx.pool, run.ctx.subset);
      const Role role = league::role_from_string(gen_role);
      const int fs = run.ctx.cfg.env.frame_skip;
      eval::EvalOptions eo;
      eo.matches_per_pair = matches > 0 ? matches : 50;
      eo.env = run.ctx.cfg.env;
      eo.seed = eval_seed;
      eo.workers = run.ctx.cfg.workers;
      const eval::GeneralizationReport g = eval::evaluate_generalization(
          harness::member_agent(run.ctx, role, run.final_params[league::ridx(role)], run.ctx.cfg.eval.greedy),
          {eval::random_agent(fs), eval::scripted_agent(fs)}, run.ctx.subset, held, eo);
      const std::string out = out_or(eval_out, run_dir, "eval");
      harness::write_file_atomic(path_in(out, "generalization.csv"), g.csv());
      std::cout << g.csv();
      return 0;
    }

    if (rep->parsed()) {
      const auto logs = harness::read_matchlog(path_in(report_dir, "matchlog.jsonl"));
      if (logs.empty()) throw ConfigError("report: matchlog.jsonl has no records");
      const auto pops = harness::behavior_populations(logs);
      const std::string out = out_or(report_out, report_dir, "report");
      harness::write_file_atomic(path_in(out, "cdf_behavior.csv"), eval::cdf_report(pops));
      harness::write_file_atomic(path_in(out, "behavior_summary.csv"), harness::behavior_summary_csv(pops));
      std::cout << "wrote " << path_in(out, "cdf_behavior.csv") << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CorruptionError& e) {
    std::cerr << "corrupt: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
