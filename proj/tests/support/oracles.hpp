#pragma once

// Reference implementations shared by the unit tests and the acceptance
// suite. Deliberately naive.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "helt/core/random.hpp"
#include "helt/learn/network.hpp"
#include "helt/learn/ppo.hpp"
#include "helt/league/pfsp.hpp"

namespace helt::oracle {

struct RandomTrajectory {
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<std::uint8_t> terminals;
  double bootstrap = 0.0;
  double gamma = 0.99;
  double lam = 0.95;
};

inline RandomTrajectory random_trajectory(Rng& rng, int max_len = 16) {
  RandomTrajectory t;
  const int n = std::uniform_int_distribution<int>(1, max_len)(rng);
  std::normal_distribution<double> nd(0.0, 1.0);
  t.gamma = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
  t.lam = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
  for (int i = 0; i < n; ++i) {
    t.rewards.push_back(nd(rng));
    t.values.push_back(nd(rng));
    t.terminals.push_back(0);
  }
  // A terminal only ever closes a trajectory.
  if (uniform01(rng) < 0.3) t.terminals.back() = 1;
  t.bootstrap = t.terminals.back() ? 0.0 : nd(rng);
  return t;
}

// A_t = sum_k (gamma lam)^k delta_{t+k}, summed term by term and stopped
// after a terminal step.
inline std::vector<double> naive_gae(const RandomTrajectory& t) {
  const std::size_t n = t.rewards.size();
  auto next_value = [&](std::size_t j) {
    if (t.terminals[j]) return 0.0;
    return j + 1 < n ? t.values[j + 1] : t.bootstrap;
  };
  std::vector<double> adv(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t j = i; j < n; ++j) {
      const double delta = t.rewards[j] + t.gamma * next_value(j) - t.values[j];
      total += std::pow(t.gamma * t.lam, static_cast<double>(j - i)) * delta;
      if (t.terminals[j]) break;
    }
    adv[i] = total;
  }
  return adv;
}

inline learn::NetSpec small_spec(enc::EncoderMode mode = enc::EncoderMode::kFIS) {
  learn::NetSpec s;
  s.mode = mode;
  s.numeric_dim = 12;
  s.char_table = 3;
  s.skill_table = 3 * game::kNumSkillSlots;
  s.embedding_width = 3;
  s.hidden = 6;
  return s;
}

inline game::ActionMask random_mask(Rng& rng, double p_legal = 0.7) {
  game::ActionMask m;
  for (int h = 0; h < game::kNumHeads; ++h) {
    bool any = false;
    for (int k = 0; k < game::kHeadSizes[h]; ++k) {
      const bool legal = uniform01(rng) < p_legal;
      m.legal[game::kHeadOffsets[h] + k] = legal;
      any = any || legal;
    }
    if (!any) m.legal[game::kHeadOffsets[h] + std::uniform_int_distribution<int>(0, game::kHeadSizes[h] - 1)(rng)] = true;
  }
  return m;
}

inline learn::InputBatch random_inputs(const learn::NetSpec& spec, int n, Rng& rng) {
  learn::InputBatch b;
  b.resize(spec.numeric_dim, spec.id_slots(), n);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < spec.numeric_dim; ++r) b.numeric(r, c) = nd(rng);
    for (int k = 0; k < spec.id_slots(); ++k) {
      const int table = k % 2 == 0 ? spec.char_table : spec.skill_table;
      b.ids[c * spec.id_slots() + k] = std::uniform_int_distribution<int>(0, table - 1)(rng);
    }
    b.masks[c] = random_mask(rng);
  }
  return b;
}

// Batch sampled from `behaviour`; the returned params are a perturbed copy
// so that probability ratios spread on both sides of the clip range.
struct GradProblem {
  learn::PolicyParams params;
  learn::PpoBatch batch;
};

inline GradProblem random_grad_problem(const learn::NetSpec& spec, int n, Rng& rng, double perturb = 0.3) {
  const learn::PolicyParams behaviour = learn::PolicyParams::init(spec, rng);
  GradProblem g;
  g.batch.inputs = random_inputs(spec, n, rng);
  const learn::ForwardCache c = learn::forward_batch(behaviour, g.batch.inputs);
  std::normal_distribution<double> nd(0.0, 1.0);
  g.batch.old_logp.resize(n);
  g.batch.advantages.resize(n);
  g.batch.returns.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto a = learn::sample_heads(c, i, rng);
    g.batch.actions.push_back(a);
    const auto lp = learn::head_log_probs(c, i, a);
    g.batch.old_logp(i) = lp[0] + lp[1] + lp[2] + lp[3];
    g.batch.advantages(i) = nd(rng);
    g.batch.returns(i) = nd(rng);
  }
  g.params = behaviour;
  for (double& x : g.params.data) x += perturb * 0.1 * nd(rng);
  return g;
}

struct GradCheck {
  double rel_error = 0.0;  // ||analytic - numeric|| / max(||analytic||, ||numeric||)
  double max_abs = 0.0;
};

inline GradCheck grad_check(const learn::PolicyParams& params, const learn::PpoBatch& batch,
                            const learn::LearnerConfig& cfg, const learn::LossTerms& terms = {}, double h = 1e-6) {
  const std::vector<double> analytic = learn::ppo_loss(params, batch, cfg, terms).grad;
  learn::PolicyParams p = params;
  double diff2 = 0.0, a2 = 0.0, n2 = 0.0, max_abs = 0.0;
  for (std::size_t i = 0; i < p.data.size(); ++i) {
    const double x = p.data[i];
    p.data[i] = x + h;
    const double up = learn::ppo_loss(p, batch, cfg, terms).loss;
    p.data[i] = x - h;
    const double down = learn::ppo_loss(p, batch, cfg, terms).loss;
    p.data[i] = x;
    const double numeric = (up - down) / (2 * h);
    const double d = analytic[i] - numeric;
    diff2 += d * d;
    a2 += analytic[i] * analytic[i];
    n2 += numeric * numeric;
    max_abs = std::max(max_abs, std::abs(d));
  }
  const double denom = std::max({std::sqrt(a2), std::sqrt(n2), 1e-12});
  return {std::sqrt(diff2) / denom, max_abs};
}

// f_hard(x) = (1 - x)^p, f_var(x) = x (1 - x), normalized; all-zero
// weights fall back to uniform.
inline std::vector<double> pfsp_by_hand(const std::vector<double>& winrates, league::Weighting w, double p_hard) {
  std::vector<double> f;
  double total = 0.0;
  for (double x : winrates) {
    const double v = w == league::Weighting::kHard ? std::pow(1.0 - x, p_hard) : x * (1.0 - x);
    f.push_back(v);
    total += v;
  }
  for (double& v : f) v = total > 0.0 ? v / total : 1.0 / static_cast<double>(winrates.size());
  return f;
}

// Regret matching on plain arrays, one formula per line.
struct RmTrace {
  std::vector<double> r, R, w;
  double E = 0.0;
};

inline RmTrace rm_step(const RmTrace& prev, int n, int i, int j, bool j_wins, double gamma, double eta) {
  RmTrace s = prev;
  const int cells = n * n;
  const int at = i * n + j;
  s.r[at] = prev.r[at] * gamma + (j_wins ? 1.0 : 0.0) * (1.0 - gamma);
  s.E = 0.0;
  for (int k = 0; k < cells; ++k) s.E += s.r[k] * prev.w[k];
  double total = 0.0;
  for (int k = 0; k < cells; ++k) {
    s.R[k] = std::max(prev.R[k] + s.r[k] - s.E, 0.0);
    total += s.R[k];
  }
  for (int k = 0; k < cells; ++k) s.w[k] = total > 0.0 ? s.R[k] / total * (1.0 - eta) + eta / cells : 1.0 / cells;
  return s;
}

}  // namespace helt::oracle
