// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

// Building blocks of the joint sentiment/sarcasm network: frozen word
// embeddings, the GRU encoder, task projections, word-level attention, the
// neural tensor network that fuses the two task representations, and the
// softmax heads.

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtsa/tensor.hpp"

namespace mtsa {

using Tokens = std::vector<std::string>;
using Mask = std::vector<bool>;
using Rng = std::mt19937_64;

/// Visitor over the named trainable tensors of a parameter block.
using ParamVisitor = std::function<void(const std::string& name, Tensor& param)>;

/// Pretrained word vectors restricted to a vocabulary. Never trained.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> tokens, std::vector<double> rows, std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t rows() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const Tensor& matrix() const { return matrix_; }

  bool contains(const std::string& token) const { return index_.count(token) != 0; }
  /// Row of `token`, or an empty span when it is out of vocabulary.
  std::span<const double> lookup(const std::string& token) const;

  /// Order-independent 64-bit digest of (token, vector) pairs. Two tables
  /// agree on every lookup iff their fingerprints agree (modulo collisions).
  std::uint64_t fingerprint() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  Tensor matrix_;  // rows() x dim(), requires_grad = false
  std::size_t dim_ = 0;
};

struct EmbeddedSentence {
  Tensor x;   // L x D_g, zero rows past the sentence end and for OOV words
  Mask mask;  // true exactly on real tokens
};

EmbeddedSentence embed_and_pad(const Tokens& tokens, const EmbeddingTable& table,
                               std::size_t max_len);

// ---------------------------------------------------------------------------
// Parameters

/// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
Tensor xavier_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng);

struct GruParams {
  Tensor wz, wr, wh;  // D_g x D_gru
  Tensor uz, ur, uh;  // D_gru x D_gru
  Tensor bz, br, bh;  // D_gru

  static GruParams init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);
  std::size_t input_dim() const { return wz.dim(0); }
  std::size_t hidden_dim() const { return wz.dim(1); }
  void visit(const std::string& prefix, const ParamVisitor& fn);
};

/// Fully connected ReLU layer mapping GRU states into a task space.
struct ProjectionParams {
  Tensor w;  // D_gru x D_t
  Tensor b;  // D_t

  static ProjectionParams init(std::size_t in, std::size_t out, Rng& rng);
  void visit(const std::string& prefix, const ParamVisitor& fn);
};

struct AttentionParams {
  Tensor w_att;    // D_t x 1
  Tensor w_alpha;  // L x L

  static AttentionParams init(std::size_t task_dim, std::size_t max_len, Rng& rng);
  std::size_t max_len() const { return w_alpha.dim(0); }
  void visit(const std::string& prefix, const ParamVisitor& fn);
};

struct NtnParams {
  Tensor t;  // D_ntn x D_t x D_t
  Tensor w;  // 2 D_t x D_ntn
  Tensor b;  // D_ntn

  static NtnParams init(std::size_t task_dim, std::size_t ntn_dim, Rng& rng);
  std::size_t out_dim() const { return b.dim(0); }
  void visit(const std::string& prefix, const ParamVisitor& fn);
};

struct HeadParams {
  Tensor w;  // d_in x C
  Tensor b;  // C

  static HeadParams init(std::size_t in, std::size_t classes, Rng& rng);
  std::size_t in_dim() const { return w.dim(0); }
  void visit(const std::string& prefix, const ParamVisitor& fn);
};

// ---------------------------------------------------------------------------
// Forward blocks

struct GruOutput {
  Tensor h;     // L x D_gru; zero rows at masked steps
  Tensor last;  // D_gru, state after the last unmasked step
};

/// Cho-style GRU with per-gate biases, h_0 = 0. Masked steps carry the
/// previous state forward unchanged.
GruOutput gru_forward(const Tensor& x, const Mask& mask, const GruParams& p);

/// ReLU(H W + b) with the bias broadcast over rows. Also accepts a rank-1
/// state vector.
Tensor task_projection(const Tensor& h, const ProjectionParams& p);

struct AttentionOutput {
  Tensor s;      // D_t
  Tensor alpha;  // L, zero on masked positions
};

/// P = tanh(H W_att); alpha = softmax(P^T W_alpha) over unmasked positions;
/// s = alpha H.
AttentionOutput attention(const Tensor& h_task, const Mask& mask, const AttentionParams& p);

/// tanh(u^T T[1:k] v + (u ++ v) W + b).
Tensor ntn_fuse(const Tensor& s_sar, const Tensor& s_sen, const NtnParams& p);

struct Classification {
  Tensor logits;
  Tensor probs;
  int label = 0;
};

Classification classify(const Tensor& s, const HeadParams& p);

/// Index of the largest value; ties go to the lowest index.
int argmax(std::span<const double> values);

}  // namespace mtsa
