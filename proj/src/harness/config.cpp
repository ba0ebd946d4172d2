#include "helt/harness/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <set>

#include "helt/core/error.hpp"
#include "helt/harness/io.hpp"

namespace helt::harness {
namespace {

using league::Role;

using nlohmann::json;

constexpr std::array<int, 4> kLevelPattern{15, 15, 10, 10};
constexpr std::array<const char*, 4> kLevelKeys{"S", "A", "B", "C"};

// Reads one JSON object, rejecting unknown keys and wrong types with the
// dotted field name.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }
  // Rejects keys that were never asked for.
  void done() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(field(key) + ": unknown field");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw ConfigError(field(key) + ": expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (it->is_number_unsigned() == false && it->template get<std::int64_t>() < 0) {
            throw ConfigError(field(key) + ": must be >= 0");
          }
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw ConfigError(field(key) + ": expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw ConfigError(field(key) + ": expected a string");
      }
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key) + ": " + e.what());
    }
  }

  template <typename Fn>
  void string_enum(const char* key, Fn parse) {
    std::string text;
    seen_.insert(key);
    if (!j_.contains(key)) return;
    get(key, text);
    try {
      parse(text);
    } catch (const ConfigError& e) {
      throw ConfigError(field(key) + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_arena(const json& j, game::ArenaConfig& a) {
  Section s(j, "env.arena");
  s.get("width", a.width);
  s.get("height", a.height);
  s.get("spawn_x", a.spawn_x);
  s.get("spawn_y_jitter", a.spawn_y_jitter);
  s.get("counter_stun", a.counter_stun);
  s.get("combo_window", a.combo_window);
  s.get("buff_multiplier", a.buff_multiplier);
  s.get("max_stun", a.max_stun);
  s.done();
}

void read_env(const json& j, learn::EnvConfig& e) {
  Section s(j, "env");
  s.get("horizon", e.horizon);
  s.get("frame_skip", e.frame_skip);
  if (const json* a = s.child("arena")) read_arena(*a, e.arena);
  s.done();
}

void read_learner(const json& j, learn::LearnerConfig& c) {
  Section s(j, "learner");
  s.get("gamma", c.gamma);
  s.get("lam", c.lam);
  s.get("clip", c.clip);
  s.get("entropy_coef", c.entropy_coef);
  s.get("value_coef", c.value_coef);
  s.get("learning_rate", c.learning_rate);
  s.get("n_steps", c.n_steps);
  s.get("batch_size", c.batch_size);
  s.get("minibatch_size", c.minibatch_size);
  s.get("epochs_per_batch", c.epochs_per_batch);
  s.get("max_grad_norm", c.max_grad_norm);
  s.get("normalize_advantages", c.normalize_advantages);
  s.get("hidden", c.hidden);
  s.get("embedding_width", c.embedding_width);
  s.get("envs_per_member", c.envs_per_member);
  s.done();
}

void read_league(const json& j, league::LeagueConfig& c) {
  Section s(j, "league");
  s.get("win_threshold", c.win_threshold);
  s.get("iteration_timeout_steps", c.iteration_timeout_steps);
  s.get("total_iterations", c.total_iterations);
  s.get("league_exploiter_reset_prob", c.league_exploiter_reset_prob);
  s.get("p_hard", c.p_hard);
  s.get("reset_grace_iterations", c.reset_grace_iterations);
  s.get("reset_lookback", c.reset_lookback);
  s.get("min_matches", c.min_matches);
  s.get("winrate_smoothing", c.winrate_smoothing);
  s.string_enum("main_weighting", [&](const std::string& t) { c.main_weighting = league::weighting_from_string(t); });
  s.string_enum("main_exploiter_weighting",
                [&](const std::string& t) { c.main_exploiter_weighting = league::weighting_from_string(t); });
  s.string_enum("league_exploiter_weighting",
                [&](const std::string& t) { c.league_exploiter_weighting = league::weighting_from_string(t); });
  s.string_enum("main_mode", [&](const std::string& t) { c.main_mode = enc::mode_from_string(t); });
  s.get("allow_fis_main", c.allow_fis_main);
  s.done();
}

void read_style(const json& j, const std::string& path, game::StyleReward& r) {
  Section s(j, path);
  s.string_enum("style", [&](const std::string& t) { r = game::StyleReward::preset(game::style_from_string(t)); });
  s.get("w_self", r.w_self);
  s.get("w_opp", r.w_opp);
  s.get("time_penalty", r.time_penalty);
  s.done();
}

json style_json(const game::StyleReward& r) {
  return {{"style", std::string(game::to_string(r.style))},
          {"w_self", r.w_self},
          {"w_opp", r.w_opp},
          {"time_penalty", r.time_penalty}};
}

}  // namespace

RunConfig profile_defaults(const std::string& profile) {
  RunConfig c;
  c.profile = profile;
  if (profile == "desk") return c;
  if (profile == "paper") {
    c.learner = learn::LearnerConfig::paper();
    c.league.iteration_timeout_steps = 2'000'000;
    c.pool.per_level = 100;
    c.subset.size = 50;
    return c;
  }
  throw ConfigError("profile: unknown profile '" + profile + "' (expected desk or paper)");
}

std::array<int, 4> level_counts(int total) {
  if (total < 0) throw ConfigError("subset.size: must be >= 0");
  const int denom = 50;
  std::array<int, 4> out{};
  std::array<int, 4> rem{};
  int assigned = 0;
  for (int l = 0; l < 4; ++l) {
    out[l] = total * kLevelPattern[l] / denom;
    rem[l] = total * kLevelPattern[l] % denom;
    assigned += out[l];
  }
  std::array<int, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
  for (int k = 0; assigned < total; ++k, ++assigned) out[order[k % 4]] += 1;
  return out;
}

void validate(const RunConfig& c) {
  if (c.profile != "desk" && c.profile != "paper") throw ConfigError("profile: expected desk or paper");
  if (c.workers < 1) throw ConfigError("workers: must be >= 1");
  learn::validate(c.env);
  learn::validate(c.learner);
  league::validate(c.league);
  if (!(c.matchup.gamma >= 0.0 && c.matchup.gamma < 1.0)) throw ConfigError("matchup.gamma: must be in [0, 1)");
  if (!(c.matchup.eta > 0.0)) throw ConfigError("matchup.eta: must be > 0");
  for (Role r : league::kRoles) {
    try {
      game::validate(c.styles[league::ridx(r)]);
    } catch (const ConfigError& e) {
      throw ConfigError("rewards." + std::string(league::to_string(r)) + ": " + e.what());
    }
  }
  if (c.pool.file.empty()) {
    if (c.pool.per_level < 1) throw ConfigError("pool.per_level: must be >= 1");
  } else if (!std::filesystem::exists(c.pool.file)) {
    throw ConfigError("pool.file: '" + c.pool.file + "' does not exist");
  }
  if (c.subset.size < 2) throw ConfigError("subset.size: must be >= 2");
  const bool explicit_counts = c.subset.per_level != std::array<int, 4>{-1, -1, -1, -1};
  if (explicit_counts) {
    int sum = 0;
    for (int l = 0; l < 4; ++l) {
      if (c.subset.per_level[l] < 0) {
        throw ConfigError("subset.per_level." + std::string(kLevelKeys[l]) + ": must be >= 0");
      }
      sum += c.subset.per_level[l];
    }
    if (sum != c.subset.size) throw ConfigError("subset.per_level: counts must sum to subset.size");
  }
  if (c.pool.file.empty()) {
    const std::array<int, 4> counts = explicit_counts ? c.subset.per_level : level_counts(c.subset.size);
    for (int l = 0; l < 4; ++l) {
      if (counts[l] > c.pool.per_level) {
        throw ConfigError("subset.per_level." + std::string(kLevelKeys[l]) + ": " + std::to_string(counts[l]) +
                          " exceeds the " + std::to_string(c.pool.per_level) + " characters available");
      }
    }
  }
  if (c.eval.final_matches < 0) throw ConfigError("eval.final_matches: must be >= 0");
  if (c.eval.log_matches < 0) throw ConfigError("eval.log_matches: must be >= 0");
  if (c.output_dir.empty()) throw ConfigError("output_dir: must not be empty");
}

RunConfig config_from_json(const json& j) {
  std::string profile = "desk";
  if (j.is_object() && j.contains("profile")) {
    if (!j["profile"].is_string()) throw ConfigError("profile: expected a string");
    profile = j["profile"].get<std::string>();
  }
  RunConfig c = profile_defaults(profile);
  {
    Section s(j, "");
    s.get("profile", c.profile);
    s.get("seed", c.seed);
    s.get("deterministic", c.deterministic);
    s.get("workers", c.workers);
    s.get("output_dir", c.output_dir);
    if (const json* e = s.child("env")) read_env(*e, c.env);
    if (const json* l = s.child("learner")) read_learner(*l, c.learner);
    if (const json* l = s.child("league")) read_league(*l, c.league);
    if (const json* m = s.child("matchup")) {
      Section ms(*m, "matchup");
      ms.get("gamma", c.matchup.gamma);
      ms.get("eta", c.matchup.eta);
      ms.done();
    }
    if (const json* r = s.child("rewards")) {
      Section rs(*r, "rewards");
      for (Role role : league::kRoles) {
        const std::string name(league::to_string(role));
        if (const json* rj = rs.child(name.c_str())) read_style(*rj, "rewards." + name, c.styles[league::ridx(role)]);
      }
      rs.done();
    }
    if (const json* p = s.child("pool")) {
      Section ps(*p, "pool");
      ps.get("file", c.pool.file);
      ps.get("per_level", c.pool.per_level);
      ps.get("seed", c.pool.seed);
      ps.done();
    }
    if (const json* sub = s.child("subset")) {
      Section ss(*sub, "subset");
      ss.get("size", c.subset.size);
      if (const json* pl = ss.child("per_level")) {
        Section ls(*pl, "subset.per_level");
        c.subset.per_level = {0, 0, 0, 0};
        for (int l = 0; l < 4; ++l) ls.get(kLevelKeys[l], c.subset.per_level[l]);
        ls.done();
      }
      ss.done();
    }
    if (const json* e = s.child("eval")) {
      Section es(*e, "eval");
      es.get("final_matches", c.eval.final_matches);
      es.get("greedy", c.eval.greedy);
      es.get("log_matches", c.eval.log_matches);
      es.done();
    }
    s.done();
  }
  validate(c);
  return c;
}

json config_to_json(const RunConfig& c) {
  const game::ArenaConfig& a = c.env.arena;
  const learn::LearnerConfig& l = c.learner;
  const league::LeagueConfig& g = c.league;
  json rewards = json::object();
  for (Role r : league::kRoles) rewards[std::string(league::to_string(r))] = style_json(c.styles[league::ridx(r)]);
  json subset{{"size", c.subset.size}};
  if (c.subset.per_level != std::array<int, 4>{-1, -1, -1, -1}) {
    json pl = json::object();
    for (int i = 0; i < 4; ++i) pl[kLevelKeys[i]] = c.subset.per_level[i];
    subset["per_level"] = pl;
  }
  return {
      {"profile", c.profile},
      {"seed", c.seed},
      {"deterministic", c.deterministic},
      {"workers", c.workers},
      {"output_dir", c.output_dir},
      {"env",
       {{"horizon", c.env.horizon},
        {"frame_skip", c.env.frame_skip},
        {"arena",
         {{"width", a.width},
          {"height", a.height},
          {"spawn_x", a.spawn_x},
          {"spawn_y_jitter", a.spawn_y_jitter},
          {"counter_stun", a.counter_stun},
          {"combo_window", a.combo_window},
          {"buff_multiplier", a.buff_multiplier},
          {"max_stun", a.max_stun}}}}},
      {"learner",
       {{"gamma", l.gamma},
        {"lam", l.lam},
        {"clip", l.clip},
        {"entropy_coef", l.entropy_coef},
        {"value_coef", l.value_coef},
        {"learning_rate", l.learning_rate},
        {"n_steps", l.n_steps},
        {"batch_size", l.batch_size},
        {"minibatch_size", l.minibatch_size},
        {"epochs_per_batch", l.epochs_per_batch},
        {"max_grad_norm", l.max_grad_norm},
        {"normalize_advantages", l.normalize_advantages},
        {"hidden", l.hidden},
        {"embedding_width", l.embedding_width},
        {"envs_per_member", l.envs_per_member}}},
      {"league",
       {{"win_threshold", g.win_threshold},
        {"iteration_timeout_steps", g.iteration_timeout_steps},
        {"total_iterations", g.total_iterations},
        {"league_exploiter_reset_prob", g.league_exploiter_reset_prob},
        {"p_hard", g.p_hard},
        {"reset_grace_iterations", g.reset_grace_iterations},
        {"reset_lookback", g.reset_lookback},
        {"min_matches", g.min_matches},
        {"winrate_smoothing", g.winrate_smoothing},
        {"main_weighting", std::string(league::to_string(g.main_weighting))},
        {"main_exploiter_weighting", std::string(league::to_string(g.main_exploiter_weighting))},
        {"league_exploiter_weighting", std::string(league::to_string(g.league_exploiter_weighting))},
        {"main_mode", std::string(enc::to_string(g.main_mode))},
        {"allow_fis_main", g.allow_fis_main}}},
      {"matchup", {{"gamma", c.matchup.gamma}, {"eta", c.matchup.eta}}},
      {"rewards", rewards},
      {"pool", {{"file", c.pool.file}, {"per_level", c.pool.per_level}, {"seed", c.pool.seed}}},
      {"subset", subset},
      {"eval",
       {{"final_matches", c.eval.final_matches},
        {"greedy", c.eval.greedy},
        {"log_matches", c.eval.log_matches}}},
  };
}

RunConfig load_config(const std::string& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config: file '" + path + "' does not exist");
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  return config_from_json(j);
}

std::string dump_config(const RunConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

std::string config_hash(const RunConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("output_dir");
  return sha256_hex(j.dump());
}

std::vector<game::CharacterSpec> load_pool(const RunConfig& cfg) {
  if (!cfg.pool.file.empty()) return game::load_pool(cfg.pool.file);
  return game::generate_pool(cfg.pool.per_level, cfg.pool.seed);
}

std::vector<game::CharacterSpec> select_subset(const std::vector<game::CharacterSpec>& pool, const SubsetConfig& cfg) {
  const std::array<int, 4> counts =
      cfg.per_level != std::array<int, 4>{-1, -1, -1, -1} ? cfg.per_level : level_counts(cfg.size);
  std::array<int, 4> available{};
  for (const game::CharacterSpec& c : pool) available[static_cast<int>(c.level)] += 1;
  for (int l = 0; l < 4; ++l) {
    if (counts[l] > available[l]) {
      throw ConfigError("subset.per_level." + std::string(kLevelKeys[l]) + ": " + std::to_string(counts[l]) +
                        " exceeds the " + std::to_string(available[l]) + " characters available");
    }
  }
  std::array<int, 4> taken{};
  std::vector<game::CharacterSpec> out;
  for (const game::CharacterSpec& c : pool) {
    const int l = static_cast<int>(c.level);
    if (taken[l] < counts[l]) {
      out.push_back(c);
      taken[l] += 1;
    }
  }
  return out;
}

std::vector<game::CharacterSpec> held_out(const std::vector<game::CharacterSpec>& pool,
                                          const std::vector<game::CharacterSpec>& subset) {
  std::vector<game::CharacterSpec> out;
  for (const game::CharacterSpec& c : pool) {
    const bool familiar =
        std::any_of(subset.begin(), subset.end(), [&](const game::CharacterSpec& s) { return s.char_id == c.char_id; });
    if (!familiar) out.push_back(c);
  }
  return out;
}

std::string resolve_output_dir(const RunConfig& cfg) {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? std::string(env) : cfg.output_dir;
}

}  // namespace helt::harness
