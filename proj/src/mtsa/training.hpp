// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mtsa/model.hpp"

namespace mtsa {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  std::uint64_t seed = 1;
  double weight_sentiment = 1.0;
  double weight_sarcasm = 1.0;

  void validate() const;
};

/// Mean categorical cross-entropy of [N x C] (or [C]) logits against labels.
Tensor cross_entropy(const Tensor& logits, std::span<const int> labels);

struct JointLoss {
  Tensor total;  // w_sen J_sen + w_sar J_sar, differentiable
  double sentiment = 0.0;
  double sarcasm = 0.0;
};

/// Sums the per-task losses of a batch. Tasks a model does not predict
/// contribute nothing.
JointLoss joint_loss(std::span<const ModelOutput> outputs, std::span<const int> sentiment,
                     std::span<const int> sarcasm, double weight_sentiment = 1.0,
                     double weight_sarcasm = 1.0);

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t t = 0;
};

/// One bias-corrected ADAM update of every parameter from its current grad.
/// Parameters that received no gradient are treated as having a zero one.
void adam_step(std::span<NamedParam> params, AdamState& state, const TrainConfig& cfg);

struct Example {
  Tokens tokens;
  int sentiment = 0;
  int sarcasm = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double sentiment = 0.0;
  double sarcasm = 0.0;
  double joint = 0.0;
};

/// Called after every epoch; returning false stops training early.
using EpochCallback = std::function<bool(const EpochRecord&, const Model&)>;

struct TrainResult {
  std::vector<EpochRecord> trace;
};

/// Mini-batch ADAM on the joint loss. Deterministic for a fixed seed: the
/// shuffle order is drawn from cfg.seed and the model was initialised from its own seed.
TrainResult train(Model& model, std::span<const Example> data, const EmbeddingTable& table,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

struct Prediction {
  int sentiment = -1;  // -1 when the model has no such head
  int sarcasm = -1;
};

Prediction predict(const Model& model, const Tokens& tokens, const EmbeddingTable& table);

}  // namespace mtsa
