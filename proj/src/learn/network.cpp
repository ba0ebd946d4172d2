#include "helt/learn/network.hpp"

#include <cmath>
#include <limits>

#include "helt/core/error.hpp"

namespace helt::learn {
namespace {

using CMap = Eigen::Map<const Eigen::MatrixXd>;
using Map = Eigen::Map<Eigen::MatrixXd>;

struct Views {
  int emb_char = -1, emb_skill = -1, w1, b1, w2, b2, wp, bp, wv, bv;
};

Views views_for(const std::vector<TensorInfo>& t) {
  Views v{};
  int i = 0;
  if (t.front().name == "char_embedding") {
    v.emb_char = 0;
    v.emb_skill = 1;
    i = 2;
  }
  v.w1 = i++;
  v.b1 = i++;
  v.w2 = i++;
  v.b2 = i++;
  v.wp = i++;
  v.bp = i++;
  v.wv = i++;
  v.bv = i++;
  return v;
}

CMap cview(const PolicyParams& p, const TensorInfo& t) { return CMap(p.data.data() + t.offset, t.rows, t.cols); }
Map view(std::vector<double>& g, const TensorInfo& t) { return Map(g.data() + t.offset, t.rows, t.cols); }

void masked_softmax(const Eigen::MatrixXd& logits, const std::vector<game::ActionMask>& masks,
                    Eigen::MatrixXd& probs) {
  probs.setZero(logits.rows(), logits.cols());
  for (int b = 0; b < logits.cols(); ++b) {
    const auto& legal = masks[b].legal;
    for (int h = 0; h < game::kNumHeads; ++h) {
      const int off = game::kHeadOffsets[h], n = game::kHeadSizes[h];
      double mx = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < n; ++k) {
        if (legal[off + k]) mx = std::max(mx, logits(off + k, b));
      }
      if (!std::isfinite(mx)) throw ContractViolation("forward: every entry of head " + std::to_string(h) + " is masked");
      double z = 0.0;
      for (int k = 0; k < n; ++k) {
        if (legal[off + k]) z += (probs(off + k, b) = std::exp(logits(off + k, b) - mx));
      }
      for (int k = 0; k < n; ++k) probs(off + k, b) /= z;
    }
  }
}

}  // namespace

NetSpec NetSpec::for_mode(enc::EncoderMode mode, const enc::IdTable& ids, int hidden, int embedding_width) {
  NetSpec s;
  s.mode = mode;
  s.char_table = ids.char_table_size();
  s.skill_table = ids.skill_table_size();
  s.hidden = hidden;
  s.embedding_width = embedding_width;
  return s;
}

std::vector<TensorInfo> layout(const NetSpec& spec) {
  std::vector<TensorInfo> t;
  if (spec.id_slots() > 0) {
    t.push_back({"char_embedding", spec.embedding_width, spec.char_table});
    t.push_back({"skill_embedding", spec.embedding_width, spec.skill_table});
  }
  t.push_back({"trunk1.weight", spec.hidden, spec.input_dim()});
  t.push_back({"trunk1.bias", spec.hidden, 1});
  t.push_back({"trunk2.weight", spec.hidden, spec.hidden});
  t.push_back({"trunk2.bias", spec.hidden, 1});
  t.push_back({"policy.weight", game::kNumLogits, spec.hidden});
  t.push_back({"policy.bias", game::kNumLogits, 1});
  t.push_back({"value.weight", 1, spec.hidden});
  t.push_back({"value.bias", 1, 1});
  std::size_t off = 0;
  for (auto& x : t) {
    x.offset = off;
    off += x.size();
  }
  return t;
}

std::size_t param_count(const NetSpec& spec) {
  const auto t = layout(spec);
  return t.back().offset + t.back().size();
}

PolicyParams PolicyParams::init(const NetSpec& spec, Rng& rng) {
  if (spec.hidden <= 0 || spec.embedding_width <= 0 || spec.numeric_dim <= 0) {
    throw ConfigError("network: hidden, embedding_width and numeric_dim must be > 0");
  }
  PolicyParams p{spec, std::vector<double>(param_count(spec), 0.0)};
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const TensorInfo& t : layout(spec)) {
    double scale = 0.0;
    if (t.name.ends_with("embedding")) scale = 1.0;
    else if (t.name == "policy.weight") scale = 0.01;
    else if (t.name == "value.weight") scale = 0.1 / std::sqrt(t.cols);
    else if (t.name.ends_with("weight")) scale = 1.0 / std::sqrt(t.cols);
    if (scale == 0.0) continue;
    for (std::size_t i = 0; i < t.size(); ++i) p.data[t.offset + i] = scale * normal(rng);
  }
  return p;
}

bool PolicyParams::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void InputBatch::resize(int numeric_dim, int id_slots, int batch) {
  numeric.resize(numeric_dim, batch);
  ids.assign(static_cast<std::size_t>(id_slots) * batch, 0);
  masks.assign(batch, {});
}

void InputBatch::set(int column, const enc::Observation& obs, const game::ActionMask& mask) {
  if (obs.numeric_size() != numeric.rows()) throw ContractViolation("input batch: numeric width mismatch");
  obs.numeric_into(numeric.col(column).data());
  const std::vector<int> id = obs.id_indices();
  const std::size_t slots = masks.empty() ? 0 : ids.size() / masks.size();
  if (id.size() != slots) throw ContractViolation("input batch: id slot count mismatch");
  std::copy(id.begin(), id.end(), ids.begin() + column * slots);
  masks[column] = mask;
}

ForwardCache forward_batch(const PolicyParams& params, const InputBatch& batch) {
  const NetSpec& s = params.spec;
  const auto t = layout(s);
  const Views v = views_for(t);
  const int B = batch.size();
  if (batch.numeric.rows() != s.numeric_dim) throw ContractViolation("forward: numeric width mismatch");
  if (static_cast<int>(batch.masks.size()) != B) throw ContractViolation("forward: mask count mismatch");
  ForwardCache c;
  c.ids = batch.ids;
  c.masks = batch.masks;
  c.input.resize(s.input_dim(), B);
  const int slots = s.id_slots(), w = s.embedding_width;
  for (int b = 0; b < B; ++b) {
    for (int k = 0; k < slots; ++k) {
      const int row = batch.ids[b * slots + k];
      const TensorInfo& table = t[k % 2 == 0 ? v.emb_char : v.emb_skill];
      if (row < 0 || row >= table.cols) throw ContractViolation("forward: id index out of range");
      c.input.block(k * w, b, w, 1) = cview(params, table).col(row);
    }
  }
  c.input.bottomRows(s.numeric_dim) = batch.numeric;
  c.h1 = ((cview(params, t[v.w1]) * c.input).colwise() + cview(params, t[v.b1]).col(0)).array().tanh().matrix();
  c.h2 = ((cview(params, t[v.w2]) * c.h1).colwise() + cview(params, t[v.b2]).col(0)).array().tanh().matrix();
  c.logits = (cview(params, t[v.wp]) * c.h2).colwise() + cview(params, t[v.bp]).col(0);
  c.values = ((cview(params, t[v.wv]) * c.h2).array() + cview(params, t[v.bv])(0, 0)).matrix().transpose();
  masked_softmax(c.logits, c.masks, c.probs);
  return c;
}

void backward(const PolicyParams& params, const ForwardCache& c, const Eigen::MatrixXd& dlogits,
              const Eigen::VectorXd& dvalues, std::vector<double>& grad) {
  const NetSpec& s = params.spec;
  const auto t = layout(s);
  const Views v = views_for(t);
  if (grad.size() != params.data.size()) throw ContractViolation("backward: gradient size mismatch");
  view(grad, t[v.wp]).noalias() += dlogits * c.h2.transpose();
  view(grad, t[v.bp]).col(0) += dlogits.rowwise().sum();
  view(grad, t[v.wv]).noalias() += dvalues.transpose() * c.h2.transpose();
  view(grad, t[v.bv])(0, 0) += dvalues.sum();
  Eigen::MatrixXd dh2 = cview(params, t[v.wp]).transpose() * dlogits + cview(params, t[v.wv]).transpose() * dvalues.transpose();
  Eigen::MatrixXd dz2 = dh2.array() * (1.0 - c.h2.array().square());
  view(grad, t[v.w2]).noalias() += dz2 * c.h1.transpose();
  view(grad, t[v.b2]).col(0) += dz2.rowwise().sum();
  Eigen::MatrixXd dh1 = cview(params, t[v.w2]).transpose() * dz2;
  Eigen::MatrixXd dz1 = dh1.array() * (1.0 - c.h1.array().square());
  view(grad, t[v.w1]).noalias() += dz1 * c.input.transpose();
  view(grad, t[v.b1]).col(0) += dz1.rowwise().sum();
  const int slots = s.id_slots();
  if (slots == 0) return;
  const int w = s.embedding_width;
  Eigen::MatrixXd dx = cview(params, t[v.w1]).leftCols(slots * w).transpose() * dz1;
  for (int b = 0; b < static_cast<int>(dx.cols()); ++b) {
    for (int k = 0; k < slots; ++k) {
      const int row = c.ids[b * slots + k];
      view(grad, t[k % 2 == 0 ? v.emb_char : v.emb_skill]).col(row) += dx.block(k * w, b, w, 1);
    }
  }
}

void check_mask(const game::ActionMask& mask) {
  for (int h = 0; h < game::kNumHeads; ++h) {
    bool any = false;
    for (int k = 0; k < game::kHeadSizes[h]; ++k) any = any || mask.legal[game::kHeadOffsets[h] + k];
    if (!any) throw ContractViolation("forward: every entry of head " + std::to_string(h) + " is masked");
  }
}

PolicyOutput forward(const PolicyParams& params, const enc::Observation& obs, const game::ActionMask& mask) {
  check_mask(mask);
  InputBatch batch;
  batch.resize(params.spec.numeric_dim, params.spec.id_slots(), 1);
  batch.set(0, obs, mask);
  const ForwardCache c = forward_batch(params, batch);
  PolicyOutput out;
  for (int h = 0; h < game::kNumHeads; ++h) {
    auto& p = out.heads.probs[h];
    p.resize(game::kHeadSizes[h]);
    for (int k = 0; k < game::kHeadSizes[h]; ++k) p[k] = c.probs(game::kHeadOffsets[h] + k, 0);
  }
  out.value = c.values(0);
  if (!std::isfinite(out.value)) throw NumericError("forward: non-finite value");
  return out;
}

std::array<double, game::kNumHeads> head_log_probs(const ForwardCache& c, int col,
                                                   const std::array<int, game::kNumHeads>& choice) {
  std::array<double, game::kNumHeads> out{};
  for (int h = 0; h < game::kNumHeads; ++h) {
    const int off = game::kHeadOffsets[h], n = game::kHeadSizes[h];
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      if (c.masks[col].legal[off + k]) mx = std::max(mx, c.logits(off + k, col));
    }
    double z = 0.0;
    for (int k = 0; k < n; ++k) {
      if (c.masks[col].legal[off + k]) z += std::exp(c.logits(off + k, col) - mx);
    }
    if (!c.masks[col].legal[off + choice[h]]) {
      out[h] = -std::numeric_limits<double>::infinity();
    } else {
      out[h] = c.logits(off + choice[h], col) - mx - std::log(z);
    }
  }
  return out;
}

std::array<int, game::kNumHeads> sample_heads(const ForwardCache& c, int col, Rng& rng) {
  std::array<int, game::kNumHeads> out{};
  for (int h = 0; h < game::kNumHeads; ++h) {
    const int off = game::kHeadOffsets[h], n = game::kHeadSizes[h];
    double u = uniform01(rng);
    int pick = -1;
    for (int k = 0; k < n; ++k) {
      const double p = c.probs(off + k, col);
      if (p <= 0.0) continue;
      pick = k;
      if (u < p) break;
      u -= p;
    }
    out[h] = pick;
  }
  return out;
}

std::array<int, game::kNumHeads> greedy_heads(const ForwardCache& c, int col) {
  std::array<int, game::kNumHeads> out{};
  for (int h = 0; h < game::kNumHeads; ++h) {
    const int off = game::kHeadOffsets[h];
    int best = -1;
    for (int k = 0; k < game::kHeadSizes[h]; ++k) {
      if (!c.masks[col].legal[off + k]) continue;
      if (best < 0 || c.probs(off + k, col) > c.probs(off + best, col)) best = k;
    }
    out[h] = best;
  }
  return out;
}

}  // namespace helt::learn
