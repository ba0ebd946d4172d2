#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "helt/core/random.hpp"
#include "helt/encoders/encoder.hpp"
#include "helt/game/state.hpp"

namespace helt::learn {

// Shape of the policy/value network: optional embedding tables, a shared
// two-layer tanh trunk, four masked categorical heads and a scalar value.
struct NetSpec {
  enc::EncoderMode mode = enc::EncoderMode::kQS;
  int numeric_dim = enc::kNumericDim;
  int char_table = 1;
  int skill_table = game::kNumSkillSlots;
  int embedding_width = 8;
  int hidden = 128;

  int id_slots() const { return enc::num_id_slots(mode); }
  int input_dim() const { return numeric_dim + id_slots() * embedding_width; }

  static NetSpec for_mode(enc::EncoderMode mode, const enc::IdTable& ids, int hidden, int embedding_width);

  friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

struct TensorInfo {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

// Tensor layout in the flat parameter vector. Every tensor is stored
// column-major.
std::vector<TensorInfo> layout(const NetSpec& spec);
std::size_t param_count(const NetSpec& spec);

struct PolicyParams {
  NetSpec spec;
  std::vector<double> data;

  static PolicyParams init(const NetSpec& spec, Rng& rng);

  bool all_finite() const;
  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

// A batch of network inputs, one column per sample.
struct InputBatch {
  Eigen::MatrixXd numeric;              // numeric_dim x B
  std::vector<int> ids;                 // id_slots x B, column-major
  std::vector<game::ActionMask> masks;  // B

  int size() const { return static_cast<int>(numeric.cols()); }
  void resize(int numeric_dim, int id_slots, int batch);
  void set(int column, const enc::Observation& obs, const game::ActionMask& mask);
};

struct ForwardCache {
  Eigen::MatrixXd input;   // input_dim x B
  Eigen::MatrixXd h1;      // hidden x B (post-tanh)
  Eigen::MatrixXd h2;      // hidden x B (post-tanh)
  Eigen::MatrixXd logits;  // 24 x B
  Eigen::MatrixXd probs;   // 24 x B, masked softmax per head
  Eigen::VectorXd values;  // B
  std::vector<int> ids;
  std::vector<game::ActionMask> masks;
};

ForwardCache forward_batch(const PolicyParams& params, const InputBatch& batch);

// Backpropagates d(loss)/d(logits) and d(loss)/d(values) into a flat
// gradient of the same layout as PolicyParams::data (accumulated into grad).
void backward(const PolicyParams& params, const ForwardCache& cache, const Eigen::MatrixXd& dlogits,
              const Eigen::VectorXd& dvalues, std::vector<double>& grad);

struct HeadDistributions {
  std::array<std::vector<double>, game::kNumHeads> probs;
};

struct PolicyOutput {
  HeadDistributions heads;
  double value = 0.0;
};

// Single-observation forward pass. Throws ContractViolation when a head has
// no legal entry.
PolicyOutput forward(const PolicyParams& params, const enc::Observation& obs, const game::ActionMask& mask);

void check_mask(const game::ActionMask& mask);

// Per-head log-probabilities of an action under column `col` of `cache`.
std::array<double, game::kNumHeads> head_log_probs(const ForwardCache& cache, int col,
                                                   const std::array<int, game::kNumHeads>& choice);

std::array<int, game::kNumHeads> sample_heads(const ForwardCache& cache, int col, Rng& rng);
std::array<int, game::kNumHeads> greedy_heads(const ForwardCache& cache, int col);

}  // namespace helt::learn
