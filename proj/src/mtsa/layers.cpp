// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#include "mtsa/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "mtsa/error.hpp"

namespace mtsa {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t len,
                    std::uint64_t h = 14695981039346656037ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

void expect_shape(const char* what, const Tensor& t, const Shape& shape) {
  if (t.shape() != shape) {
    fail(ErrorKind::kDimension, std::string(what) + ": expected " + shape_str(shape) +
                                    ", got " + shape_str(t.shape()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// EmbeddingTable

EmbeddingTable::EmbeddingTable(std::vector<std::string> tokens, std::vector<double> rows,
                               std::size_t dim)
    : tokens_(std::move(tokens)), dim_(dim) {
  if (dim_ == 0) fail(ErrorKind::kDimension, "embedding dimension must be positive");
  if (rows.size() != tokens_.size() * dim_) {
    fail(ErrorKind::kDimension, "embedding table: " + std::to_string(rows.size()) +
                                    " values for " + std::to_string(tokens_.size()) +
                                    " tokens of dimension " + std::to_string(dim_));
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      fail(ErrorKind::kInput, "embedding table: duplicate token '" + tokens_[i] + "'");
    }
  }
  matrix_ = Tensor::from_values({tokens_.size(), dim_}, std::move(rows));
}

std::span<const double> EmbeddingTable::lookup(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return {};
  return matrix_.values().subspan(it->second * dim_, dim_);
}

std::uint64_t EmbeddingTable::fingerprint() const {
  std::vector<std::size_t> order(tokens_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return tokens_[a] < tokens_[b]; });
  std::uint64_t h = fnv1a(&dim_, sizeof dim_);
  for (std::size_t i : order) {
    const auto& tok = tokens_[i];
    h = fnv1a(tok.data(), tok.size() + 1, h);  // include the terminator as separator
    h = fnv1a(matrix_.values().data() + i * dim_, dim_ * sizeof(double), h);
  }
  return h;
}

EmbeddedSentence embed_and_pad(const Tokens& tokens, const EmbeddingTable& table,
                               std::size_t max_len) {
  if (tokens.empty()) fail(ErrorKind::kInput, "cannot embed an empty token list");
  if (tokens.size() > max_len) {
    fail(ErrorKind::kInput, "sentence of " + std::to_string(tokens.size()) +
                                " tokens exceeds padded length " + std::to_string(max_len));
  }
  const std::size_t dim = table.dim();
  std::vector<double> x(max_len * dim, 0.0);
  Mask mask(max_len, false);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    mask[i] = true;
    auto row = table.lookup(tokens[i]);
    if (!row.empty()) std::copy(row.begin(), row.end(), x.begin() + i * dim);
  }
  return {Tensor::from_values({max_len, dim}, std::move(x)), std::move(mask)};
}

// ---------------------------------------------------------------------------
// Parameters

Tensor xavier_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  std::vector<double> values(shape_numel(shape));
  for (auto& v : values) v = dist(rng);
  return Tensor::from_values(std::move(shape), std::move(values), true);
}

GruParams GruParams::init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
  GruParams p;
  p.wz = xavier_uniform({input_dim, hidden_dim}, input_dim, hidden_dim, rng);
  p.wr = xavier_uniform({input_dim, hidden_dim}, input_dim, hidden_dim, rng);
  p.wh = xavier_uniform({input_dim, hidden_dim}, input_dim, hidden_dim, rng);
  p.uz = xavier_uniform({hidden_dim, hidden_dim}, hidden_dim, hidden_dim, rng);
  p.ur = xavier_uniform({hidden_dim, hidden_dim}, hidden_dim, hidden_dim, rng);
  p.uh = xavier_uniform({hidden_dim, hidden_dim}, hidden_dim, hidden_dim, rng);
  p.bz = Tensor::zeros({hidden_dim}, true);
  p.br = Tensor::zeros({hidden_dim}, true);
  p.bh = Tensor::zeros({hidden_dim}, true);
  return p;
}

void GruParams::visit(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + ".Wz", wz);
  fn(prefix + ".Wr", wr);
  fn(prefix + ".Wh", wh);
  fn(prefix + ".Uz", uz);
  fn(prefix + ".Ur", ur);
  fn(prefix + ".Uh", uh);
  fn(prefix + ".bz", bz);
  fn(prefix + ".br", br);
  fn(prefix + ".bh", bh);
}

ProjectionParams ProjectionParams::init(std::size_t in, std::size_t out, Rng& rng) {
  return {xavier_uniform({in, out}, in, out, rng), Tensor::zeros({out}, true)};
}

void ProjectionParams::visit(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + ".W", w);
  fn(prefix + ".b", b);
}

AttentionParams AttentionParams::init(std::size_t task_dim, std::size_t max_len, Rng& rng) {
  return {xavier_uniform({task_dim, 1}, task_dim, 1, rng),
          xavier_uniform({max_len, max_len}, max_len, max_len, rng)};
}

void AttentionParams::visit(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + ".W_att", w_att);
  fn(prefix + ".W_alpha", w_alpha);
}

NtnParams NtnParams::init(std::size_t task_dim, std::size_t ntn_dim, Rng& rng) {
  // Each slice of T is a task_dim x task_dim bilinear form.
  return {xavier_uniform({ntn_dim, task_dim, task_dim}, task_dim, task_dim, rng),
          xavier_uniform({2 * task_dim, ntn_dim}, 2 * task_dim, ntn_dim, rng),
          Tensor::zeros({ntn_dim}, true)};
}

void NtnParams::visit(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + ".T", t);
  fn(prefix + ".W", w);
  fn(prefix + ".b", b);
}

HeadParams HeadParams::init(std::size_t in, std::size_t classes, Rng& rng) {
  return {xavier_uniform({in, classes}, in, classes, rng), Tensor::zeros({classes}, true)};
}

void HeadParams::visit(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + ".W", w);
  fn(prefix + ".b", b);
}

// ---------------------------------------------------------------------------
// Forward blocks

GruOutput gru_forward(const Tensor& x, const Mask& mask, const GruParams& p) {
  const std::size_t in = p.input_dim();
  const std::size_t hid = p.hidden_dim();
  if (x.rank() != 2 || x.dim(1) != in) {
    fail(ErrorKind::kDimension, "gru_forward: input " + shape_str(x.shape()) +
                                    " does not match W " + shape_str(p.wz.shape()));
  }
  const std::size_t steps = x.dim(0);
  if (mask.size() != steps) {
    fail(ErrorKind::kDimension, "gru_forward: mask length " + std::to_string(mask.size()) +
                                    " for " + std::to_string(steps) + " steps");
  }
  expect_shape("gru U_z", p.uz, {hid, hid});
  expect_shape("gru U_r", p.ur, {hid, hid});
  expect_shape("gru U_h", p.uh, {hid, hid});
  expect_shape("gru b_z", p.bz, {hid});
  expect_shape("gru b_r", p.br, {hid});
  expect_shape("gru b_h", p.bh, {hid});

  // Input contributions for every step in one product per gate.
  const Tensor xz = add(matmul(x, p.wz), p.bz);
  const Tensor xr = add(matmul(x, p.wr), p.br);
  const Tensor xh = add(matmul(x, p.wh), p.bh);

  Tensor state = Tensor::zeros({hid});
  std::vector<Tensor> rows(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    if (!mask[t]) continue;
    const Tensor z = sigmoid(add(row(xz, t), matmul(state, p.uz)));
    const Tensor r = sigmoid(add(row(xr, t), matmul(state, p.ur)));
    const Tensor candidate = tanh(add(row(xh, t), matmul(mul(r, state), p.uh)));
    // (1 - z) * h + z * candidate
    state = add(state, mul(z, sub(candidate, state)));
    rows[t] = state;
  }
  return {stack_rows(rows, hid), state};
}

Tensor task_projection(const Tensor& h, const ProjectionParams& p) {
  return relu(add(matmul(h, p.w), p.b));
}

AttentionOutput attention(const Tensor& h_task, const Mask& mask, const AttentionParams& p) {
  if (h_task.rank() != 2) {
    fail(ErrorKind::kDimension, "attention: expected L x D_t, got " + shape_str(h_task.shape()));
  }
  const std::size_t len = h_task.dim(0);
  expect_shape("attention W_att", p.w_att, {h_task.dim(1), 1});
  expect_shape("attention W_alpha", p.w_alpha, {len, len});
  if (mask.size() != len) {
    fail(ErrorKind::kDimension, "attention: mask length " + std::to_string(mask.size()) +
                                    " for " + std::to_string(len) + " positions");
  }
  if (std::none_of(mask.begin(), mask.end(), [](bool m) { return m; })) {
    fail(ErrorKind::kContract, "attention: every position is masked");
  }
  const Tensor scores = tanh(matmul(h_task, p.w_att));         // L x 1
  const Tensor logits = matmul(reshape(scores, {len}), p.w_alpha);  // L
  Tensor alpha = softmax(logits, mask);
  Tensor s = matmul(alpha, h_task);
  return {std::move(s), std::move(alpha)};
}

Tensor ntn_fuse(const Tensor& s_sar, const Tensor& s_sen, const NtnParams& p) {
  return tanh(add(add(bilinear(s_sar, p.t, s_sen), matmul(concat(s_sar, s_sen), p.w)), p.b));
}

int argmax(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::kInput, "argmax of an empty vector");
  // max_element returns the first maximum.
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

Classification classify(const Tensor& s, const HeadParams& p) {
  if (s.rank() != 1 || s.dim(0) != p.in_dim()) {
    fail(ErrorKind::kDimension, "classify: input " + shape_str(s.shape()) +
                                    " does not match head " + shape_str(p.w.shape()));
  }
  Classification out;
  out.logits = add(matmul(s, p.w), p.b);
  out.probs = softmax(out.logits);
  // Softmax is monotone, so the logits give the same winner without rounding ties.
  out.label = argmax(out.logits.values());
  return out;
}

}  // namespace mtsa
