#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "helt/learn/network.hpp"

namespace helt::learn {

struct LearnerConfig {
  double gamma = 0.995;
  double lam = 0.95;
  double clip = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double learning_rate = 2e-4;
  int n_steps = 100;
  int batch_size = 1024;
  int minibatch_size = 256;
  int epochs_per_batch = 2;
  double max_grad_norm = 0.5;  // <= 0 disables clipping
  bool normalize_advantages = true;
  int hidden = 128;
  int embedding_width = 8;
  int envs_per_member = 8;

  static LearnerConfig paper();
  friend bool operator==(const LearnerConfig&, const LearnerConfig&) = default;
};

void validate(const LearnerConfig& cfg);

struct Step {
  enc::Observation obs;
  game::ActionMask mask;
  std::array<int, game::kNumHeads> action{};
  std::array<double, game::kNumHeads> old_logp{};
  double reward = 0.0;
  double value = 0.0;
  bool terminal = false;
};

struct Trajectory {
  std::vector<Step> steps;
  double bootstrap_value = 0.0;  // V(s_T) of the state after the last step
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// delta_t = r_t + gamma * V_{t+1} * (1 - done_t) - V_t, accumulated backwards
// with gamma * lambda and cut at terminals.
GaeResult gae(std::span<const double> rewards, std::span<const double> values, std::span<const std::uint8_t> terminals,
              double bootstrap_value, double gamma, double lam);
GaeResult gae(const Trajectory& traj, double gamma, double lam);

struct PpoBatch {
  InputBatch inputs;
  std::vector<std::array<int, game::kNumHeads>> actions;
  Eigen::VectorXd old_logp;  // joint (sum over heads)
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;

  int size() const { return inputs.size(); }
};

struct LossTerms {
  bool policy = true;
  bool value = true;
  bool entropy = true;
};

struct LossResult {
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;  // mean squared error, before value_coef
  double entropy = 0.0;     // mean joint entropy
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  std::vector<double> grad;
};

// Clipped surrogate + value + entropy bonus, with the analytic gradient.
// Throws NumericError if anything non-finite shows up.
LossResult ppo_loss(const PolicyParams& params, const PpoBatch& batch, const LearnerConfig& cfg,
                    const LossTerms& terms = {});

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

struct AdamConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(std::vector<double>& params, std::span<const double> grad, AdamState& state, const AdamConfig& cfg);
PolicyParams update(const PolicyParams& params, std::span<const double> grad, AdamState& state,
                    const LearnerConfig& cfg);

// Rescales grad in place so its L2 norm is at most max_norm. Returns the
// norm before clipping.
double clip_grad_norm(std::vector<double>& grad, double max_norm);

struct TrainStats {
  int samples = 0;
  int updates = 0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

// Single-writer learner: owns the live parameters and optimizer state.
class Learner {
 public:
  Learner(PolicyParams params, LearnerConfig cfg);

  const PolicyParams& params() const { return params_; }
  const LearnerConfig& config() const { return cfg_; }
  const AdamState& adam() const { return adam_; }

  // Replaces parameters and clears the optimizer moments.
  void reset(PolicyParams params);

  TrainStats train(const std::vector<Trajectory>& trajectories, Rng& rng);

 private:
  PolicyParams params_;
  LearnerConfig cfg_;
  AdamState adam_;
};

}  // namespace helt::learn
