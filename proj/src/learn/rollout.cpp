#include "helt/learn/rollout.hpp"

#include "helt/core/error.hpp"
#include "helt/game/arena.hpp"

namespace helt::learn {

void validate(const EnvConfig& cfg) {
  if (cfg.horizon <= 0) throw ConfigError("env.horizon: must be > 0");
  if (cfg.frame_skip <= 0) throw ConfigError("env.frame_skip: must be > 0");
  if (cfg.arena.width <= 0.0 || cfg.arena.height <= 0.0) throw ConfigError("env.arena: extents must be > 0");
}

double score_for(game::Outcome outcome, game::Side side) {
  if (outcome == game::Outcome::kDraw || outcome == game::Outcome::kOngoing) return 0.5;
  const bool a_won = outcome == game::Outcome::kAWins;
  return (a_won == (side == game::Side::kA)) ? 1.0 : 0.0;
}

bool EpisodeRecord::learner_won() const { return learner_score() == 1.0; }
double EpisodeRecord::learner_score() const { return score_for(outcome, learner_side); }

RolloutCollector::RolloutCollector(EnvConfig env, enc::IdTable ids, game::StyleReward style, int num_envs,
                                   std::uint64_t seed)
    : env_(env), ids_(std::move(ids)), style_(style), envs_(num_envs) {
  validate(env_);
  game::validate(style_);
  HELT_EXPECT(num_envs > 0, "rollout: need at least one environment");
  for (int e = 0; e < num_envs; ++e) envs_[e].rng.seed(derive_seed(seed, e));
}

void RolloutCollector::restart() {
  for (Env& e : envs_) {
    e.running = false;
    e.fragment = {};
    e.needs_bootstrap = false;
  }
}

void RolloutCollector::start_match(Env& env, const MatchFactory& factory) {
  env.setup = factory(env.rng);
  HELT_EXPECT(env.setup.opponent != nullptr, "rollout: match factory returned no opponent");
  env.side = (env.rng() & 1) ? game::Side::kB : game::Side::kA;
  const auto& a = env.side == game::Side::kA ? env.setup.learner_char : env.setup.opp_char;
  const auto& b = env.side == game::Side::kA ? env.setup.opp_char : env.setup.learner_char;
  env.state = game::new_match(a, b, env_.horizon, env.rng(), env_.arena);
  env.setup.opponent->begin_match();
  env.running = true;
  env.episode_return = 0.0;
}

RolloutCollector::Result RolloutCollector::collect(const PolicyParams& params, std::int64_t steps,
                                                   int fragment_length, const MatchFactory& factory) {
  HELT_EXPECT(fragment_length > 0, "rollout: fragment length must be > 0");
  Result out;
  const int n = static_cast<int>(envs_.size());
  InputBatch batch;
  batch.resize(params.spec.numeric_dim, params.spec.id_slots(), n);
  std::vector<enc::Observation> obs(n);
  auto observe = [&] {
    for (int e = 0; e < n; ++e) {
      Env& env = envs_[e];
      if (!env.running) start_match(env, factory);
      obs[e] = enc::encode(env.state, env.side, params.spec.mode, ids_);
      batch.set(e, obs[e], game::legal_action_mask(env.state, env.side));
    }
    return forward_batch(params, batch);
  };
  auto flush = [&](Env& env, double bootstrap) {
    env.fragment.bootstrap_value = bootstrap;
    out.trajectories.push_back(std::move(env.fragment));
    env.fragment = {};
    env.needs_bootstrap = false;
  };

  while (out.steps < steps) {
    const ForwardCache c = observe();
    for (int e = 0; e < n; ++e) {
      Env& env = envs_[e];
      if (env.needs_bootstrap) flush(env, c.values[e]);
      const auto choice = sample_heads(c, e, env.rng);
      Step st;
      st.obs = std::move(obs[e]);
      st.mask = c.masks[e];
      st.action = choice;
      st.old_logp = head_log_probs(c, e, choice);
      st.value = c.values[e];

      const game::ActionTriple decided = game::from_head_choices(choice);
      const game::Side opp_side = game::other(env.side);
      double reward = 0.0;
      game::StepInfo info;
      for (int f = 0; f < env_.frame_skip && !env.state.terminal(); ++f) {
        const game::ActionTriple mine =
            f == 0 ? decided : hold_movement(decided, game::legal_action_mask(env.state, env.side));
        const game::ActionTriple theirs = env.setup.opponent->act(env.state, opp_side, env.rng);
        info = env.side == game::Side::kA ? game::advance(env.state, mine, theirs)
                                          : game::advance(env.state, theirs, mine);
        reward += game::step_reward(env.state, info.hp, info.terminal, env.side, style_);
      }
      st.reward = reward;
      st.terminal = info.terminal;
      env.episode_return += reward;
      env.fragment.steps.push_back(std::move(st));
      ++out.steps;

      if (info.terminal) {
        flush(env, 0.0);
        EpisodeRecord rec;
        rec.opponent_key = env.setup.opponent_key;
        rec.learner_index = env.setup.learner_index;
        rec.opp_index = env.setup.opp_index;
        rec.learner_side = env.side;
        rec.outcome = info.outcome;
        rec.frames = env.state.frame;
        rec.episode_return = env.episode_return;
        out.episodes.push_back(std::move(rec));
        env.running = false;
      } else if (static_cast<int>(env.fragment.steps.size()) >= fragment_length) {
        env.needs_bootstrap = true;
      }
    }
  }
  // Bootstrap the open fragments from the current states; the episodes
  // themselves keep running in the next call.
  bool open = false;
  for (const Env& env : envs_) open = open || !env.fragment.steps.empty();
  if (open) {
    const ForwardCache c = observe();
    for (int e = 0; e < n; ++e) {
      if (!envs_[e].fragment.steps.empty()) flush(envs_[e], c.values[e]);
    }
  }
  return out;
}

}  // namespace helt::learn
