#include "helt/learn/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "helt/core/error.hpp"

namespace helt::learn {

LearnerConfig LearnerConfig::paper() {
  LearnerConfig c;
  c.batch_size = 5120;
  c.minibatch_size = 1024;
  return c;
}

void validate(const LearnerConfig& c) {
  auto fail = [](const std::string& field, const std::string& why) { throw ConfigError("learner." + field + ": " + why); };
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) fail("gamma", "must be in (0, 1]");
  if (!(c.lam > 0.0 && c.lam <= 1.0)) fail("lam", "must be in (0, 1]");
  if (!(c.clip > 0.0 && c.clip < 1.0)) fail("clip", "must be in (0, 1)");
  if (!(c.entropy_coef >= 0.0)) fail("entropy_coef", "must be >= 0");
  if (!(c.value_coef >= 0.0)) fail("value_coef", "must be >= 0");
  if (!(c.learning_rate > 0.0)) fail("learning_rate", "must be > 0");
  if (c.n_steps <= 0) fail("n_steps", "must be > 0");
  if (c.batch_size <= 0) fail("batch_size", "must be > 0");
  if (c.minibatch_size <= 0) fail("minibatch_size", "must be > 0");
  if (c.epochs_per_batch <= 0) fail("epochs_per_batch", "must be > 0");
  if (c.hidden <= 0) fail("hidden", "must be > 0");
  if (c.embedding_width <= 0) fail("embedding_width", "must be > 0");
  if (c.envs_per_member <= 0) fail("envs_per_member", "must be > 0");
}

GaeResult gae(std::span<const double> rewards, std::span<const double> values, std::span<const std::uint8_t> terminals,
              double bootstrap_value, double gamma, double lam) {
  const std::size_t n = rewards.size();
  HELT_EXPECT(values.size() == n && terminals.size() == n, "gae: length mismatch");
  GaeResult out{std::vector<double>(n), std::vector<double>(n)};
  double next_value = bootstrap_value, acc = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double live = terminals[k] ? 0.0 : 1.0;
    const double delta = rewards[k] + gamma * next_value * live - values[k];
    acc = delta + gamma * lam * live * acc;
    out.advantages[k] = acc;
    out.returns[k] = acc + values[k];
    next_value = values[k];
  }
  return out;
}

GaeResult gae(const Trajectory& traj, double gamma, double lam) {
  std::vector<double> r, v;
  std::vector<std::uint8_t> d;
  for (const Step& s : traj.steps) {
    r.push_back(s.reward);
    v.push_back(s.value);
    d.push_back(s.terminal ? 1 : 0);
  }
  return gae(r, v, d, traj.bootstrap_value, gamma, lam);
}

LossResult ppo_loss(const PolicyParams& params, const PpoBatch& batch, const LearnerConfig& cfg,
                    const LossTerms& terms) {
  const int n = batch.size();
  HELT_EXPECT(n > 0, "ppo_loss: empty batch");
  HELT_EXPECT(static_cast<int>(batch.actions.size()) == n && batch.old_logp.size() == n &&
                  batch.advantages.size() == n && batch.returns.size() == n,
              "ppo_loss: batch field length mismatch");
  const ForwardCache c = forward_batch(params, batch.inputs);
  Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(game::kNumLogits, n);
  Eigen::VectorXd dvalues = Eigen::VectorXd::Zero(n);
  LossResult out;
  const double inv_n = 1.0 / n;
  for (int b = 0; b < n; ++b) {
    const auto& legal = c.masks[b].legal;
    const auto& act = batch.actions[b];
    double logp = 0.0, entropy = 0.0;
    std::array<double, game::kNumHeads> head_entropy{};
    for (int h = 0; h < game::kNumHeads; ++h) {
      const int off = game::kHeadOffsets[h];
      HELT_EXPECT(legal[off + act[h]], "ppo_loss: action on a masked entry");
      logp += std::log(c.probs(off + act[h], b));
      for (int k = 0; k < game::kHeadSizes[h]; ++k) {
        const double p = c.probs(off + k, b);
        if (p > 0.0) head_entropy[h] -= p * std::log(p);
      }
      entropy += head_entropy[h];
    }
    const double log_ratio = logp - batch.old_logp[b];
    const double ratio = std::exp(log_ratio);
    const double adv = batch.advantages[b];
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
    const double surr1 = ratio * adv, surr2 = clipped * adv;
    const bool unclipped = surr1 <= surr2;
    const double err = batch.returns[b] - c.values[b];
    out.policy_loss -= std::min(surr1, surr2) * inv_n;
    out.value_loss += err * err * inv_n;
    out.entropy += entropy * inv_n;
    out.approx_kl += ((ratio - 1.0) - log_ratio) * inv_n;
    if (std::abs(ratio - 1.0) > cfg.clip) out.clip_fraction += inv_n;

    const double dlogp = (terms.policy && unclipped) ? -ratio * adv * inv_n : 0.0;
    for (int h = 0; h < game::kNumHeads; ++h) {
      const int off = game::kHeadOffsets[h];
      for (int k = 0; k < game::kHeadSizes[h]; ++k) {
        if (!legal[off + k]) continue;
        const double p = c.probs(off + k, b);
        double g = dlogp * ((k == act[h] ? 1.0 : 0.0) - p);
        if (terms.entropy && p > 0.0) g += cfg.entropy_coef * inv_n * p * (std::log(p) + head_entropy[h]);
        dlogits(off + k, b) = g;
      }
    }
    if (terms.value) dvalues[b] = -2.0 * cfg.value_coef * err * inv_n;
  }
  if (terms.policy) out.loss += out.policy_loss;
  if (terms.value) out.loss += cfg.value_coef * out.value_loss;
  if (terms.entropy) out.loss -= cfg.entropy_coef * out.entropy;

  out.grad.assign(params.data.size(), 0.0);
  backward(params, c, dlogits, dvalues, out.grad);
  const bool finite = std::isfinite(out.loss) &&
                      std::all_of(out.grad.begin(), out.grad.end(), [](double g) { return std::isfinite(g); });
  if (!finite) {
    std::ostringstream msg;
    msg << "ppo_loss: non-finite value (batch " << n << ", policy " << out.policy_loss << ", value " << out.value_loss
        << ", entropy " << out.entropy << ", adv range [" << batch.advantages.minCoeff() << ", "
        << batch.advantages.maxCoeff() << "], old_logp min " << batch.old_logp.minCoeff() << ")";
    throw NumericError(msg.str());
  }
  return out;
}

void adam_step(std::vector<double>& params, std::span<const double> grad, AdamState& s, const AdamConfig& cfg) {
  HELT_EXPECT(grad.size() == params.size(), "update: gradient shape mismatch");
  if (s.m.size() != params.size()) {
    HELT_EXPECT(s.t == 0, "update: optimizer state shape mismatch");
    s.m.assign(params.size(), 0.0);
    s.v.assign(params.size(), 0.0);
  }
  ++s.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(s.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    s.m[i] = cfg.beta1 * s.m[i] + (1.0 - cfg.beta1) * grad[i];
    s.v[i] = cfg.beta2 * s.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    params[i] -= cfg.learning_rate * (s.m[i] / c1) / (std::sqrt(s.v[i] / c2) + cfg.eps);
  }
}

PolicyParams update(const PolicyParams& params, std::span<const double> grad, AdamState& state,
                    const LearnerConfig& cfg) {
  PolicyParams next = params;
  adam_step(next.data, grad, state, AdamConfig{.learning_rate = cfg.learning_rate});
  return next;
}

double clip_grad_norm(std::vector<double>& grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& g : grad) g *= scale;
  }
  return norm;
}

Learner::Learner(PolicyParams params, LearnerConfig cfg) : params_(std::move(params)), cfg_(cfg) { validate(cfg_); }

void Learner::reset(PolicyParams params) {
  HELT_EXPECT(params.spec == params_.spec, "learner reset: network shape mismatch");
  params_ = std::move(params);
  adam_ = {};
}

TrainStats Learner::train(const std::vector<Trajectory>& trajectories, Rng& rng) {
  std::vector<const Step*> steps;
  std::vector<double> adv, ret;
  for (const Trajectory& t : trajectories) {
    const GaeResult g = gae(t, cfg_.gamma, cfg_.lam);
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
      steps.push_back(&t.steps[k]);
      adv.push_back(g.advantages[k]);
      ret.push_back(g.returns[k]);
    }
  }
  TrainStats stats;
  const int n = static_cast<int>(steps.size());
  stats.samples = n;
  if (n == 0) return stats;
  if (cfg_.normalize_advantages && n > 1) {
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / n);
    for (double& a : adv) a = (a - mean) / (sd + 1e-8);
  }
  const AdamConfig adam_cfg{.learning_rate = cfg_.learning_rate};
  const int id_slots = params_.spec.id_slots();
  std::vector<int> order(n);
  for (int epoch = 0; epoch < cfg_.epochs_per_batch; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < n; start += cfg_.minibatch_size) {
      const int m = std::min(cfg_.minibatch_size, n - start);
      PpoBatch batch;
      batch.inputs.resize(params_.spec.numeric_dim, id_slots, m);
      batch.actions.resize(m);
      batch.old_logp.resize(m);
      batch.advantages.resize(m);
      batch.returns.resize(m);
      for (int b = 0; b < m; ++b) {
        const int i = order[start + b];
        const Step& s = *steps[i];
        batch.inputs.set(b, s.obs, s.mask);
        batch.actions[b] = s.action;
        batch.old_logp[b] = s.old_logp[0] + s.old_logp[1] + s.old_logp[2] + s.old_logp[3];
        batch.advantages[b] = adv[i];
        batch.returns[b] = ret[i];
      }
      LossResult r = ppo_loss(params_, batch, cfg_);
      clip_grad_norm(r.grad, cfg_.max_grad_norm);
      adam_step(params_.data, r.grad, adam_, adam_cfg);
      ++stats.updates;
      stats.policy_loss += r.policy_loss;
      stats.value_loss += r.value_loss;
      stats.entropy += r.entropy;
      stats.approx_kl += r.approx_kl;
      stats.clip_fraction += r.clip_fraction;
    }
  }
  const double inv = 1.0 / stats.updates;
  stats.policy_loss *= inv;
  stats.value_loss *= inv;
  stats.entropy *= inv;
  stats.approx_kl *= inv;
  stats.clip_fraction *= inv;
  if (!params_.all_finite()) throw NumericError("learner: parameters became non-finite");
  return stats;
}

}  // namespace helt::learn
