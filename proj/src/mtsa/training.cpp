// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#include "mtsa/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mtsa/error.hpp"

namespace mtsa {

void TrainConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      fail(ErrorKind::kConfig, std::string(what) + " must be positive");
    }
  };
  // A zero learning rate is a legal (frozen) run.
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    fail(ErrorKind::kConfig, "learning_rate must be non-negative");
  }
  positive(epsilon, "epsilon");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) fail(ErrorKind::kConfig, "beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) fail(ErrorKind::kConfig, "beta2 must lie in [0, 1)");
  if (batch_size == 0) fail(ErrorKind::kConfig, "batch_size must be positive");
  if (!(weight_sentiment >= 0.0) || !(weight_sarcasm >= 0.0)) {
    fail(ErrorKind::kConfig, "loss weights must be non-negative");
  }
}

Tensor cross_entropy(const Tensor& logits, std::span<const int> labels) {
  return softmax_cross_entropy(logits, labels);
}

JointLoss joint_loss(std::span<const ModelOutput> outputs, std::span<const int> sentiment,
                     std::span<const int> sarcasm, double weight_sentiment,
                     double weight_sarcasm) {
  if (outputs.empty()) fail(ErrorKind::kInput, "joint_loss over an empty batch");
  if (sentiment.size() != outputs.size() || sarcasm.size() != outputs.size()) {
    fail(ErrorKind::kInput, "joint_loss: label count does not match batch size");
  }
  auto task_loss = [&](auto member, std::span<const int> labels) -> Tensor {
    if (!(outputs.front().*member)) return {};
    std::vector<Tensor> rows;
    rows.reserve(outputs.size());
    for (const auto& o : outputs) rows.push_back((o.*member)->logits);
    return cross_entropy(stack_rows(rows, rows.front().size()), labels);
  };

  JointLoss out;
  const Tensor j_sen = task_loss(&ModelOutput::sentiment, sentiment);
  const Tensor j_sar = task_loss(&ModelOutput::sarcasm, sarcasm);
  if (j_sen.defined()) {
    out.sentiment = j_sen.item();
    out.total = scale(j_sen, weight_sentiment);
  }
  if (j_sar.defined()) {
    out.sarcasm = j_sar.item();
    const Tensor weighted = scale(j_sar, weight_sarcasm);
    out.total = out.total.defined() ? add(out.total, weighted) : weighted;
  }
  if (!out.total.defined()) fail(ErrorKind::kContract, "joint_loss: model has no heads");
  return out;
}

void adam_step(std::span<NamedParam> params, AdamState& state, const TrainConfig& cfg) {
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.tensor.size(), 0.0);
      state.v.emplace_back(p.tensor.size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    fail(ErrorKind::kDimension, "adam_step: optimiser state tracks " +
                                    std::to_string(state.m.size()) + " parameters, got " +
                                    std::to_string(params.size()));
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto g = params[k].tensor.grad();
    if (g.empty()) continue;
    for (double gi : g) {
      if (!std::isfinite(gi)) {
        fail(ErrorKind::kNumeric, "adam_step: non-finite gradient for " + params[k].name);
      }
    }
  }

  ++state.t;
  const double t = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& param = params[k].tensor;
    auto& m = state.m[k];
    auto& v = state.v[k];
    if (m.size() != param.size()) {
      fail(ErrorKind::kDimension, "adam_step: moment shape mismatch for " + params[k].name);
    }
    auto g = param.grad();
    auto theta = param.mutable_values();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double gi = g.empty() ? 0.0 : g[i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      theta[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

TrainResult train(Model& model, std::span<const Example> data, const EmbeddingTable& table,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (data.empty()) fail(ErrorKind::kInput, "train: empty training split");

  auto params = model.parameters();
  AdamState adam;
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  std::vector<ModelOutput> outputs;
  std::vector<int> y_sen, y_sar;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochRecord record{epoch, 0.0, 0.0, 0.0};
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      outputs.clear();
      y_sen.clear();
      y_sar.clear();
      try {
        for (std::size_t i = start; i < stop; ++i) {
          const Example& ex = data[order[i]];
          outputs.push_back(model.forward(ex.tokens, table));
          y_sen.push_back(ex.sentiment);
          y_sar.push_back(ex.sarcasm);
        }
        const JointLoss loss = joint_loss(outputs, y_sen, y_sar, cfg.weight_sentiment,
                                          cfg.weight_sarcasm);
        for (auto& p : params) p.tensor.zero_grad();
        loss.total.backward();
        adam_step(params, adam, cfg);
        const double n = static_cast<double>(stop - start);
        record.sentiment += loss.sentiment * n;
        record.sarcasm += loss.sarcasm * n;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNumeric) throw;
        fail(ErrorKind::kNumeric, "training diverged at epoch " + std::to_string(epoch) +
                                      ", batch " + std::to_string(batch_index) + ": " +
                                      e.what());
      }
    }
    const double n = static_cast<double>(data.size());
    record.sentiment /= n;
    record.sarcasm /= n;
    record.joint = cfg.weight_sentiment * record.sentiment + cfg.weight_sarcasm * record.sarcasm;
    result.trace.push_back(record);
    if (on_epoch && !on_epoch(record, model)) break;
  }
  return result;
}

Prediction predict(const Model& model, const Tokens& tokens, const EmbeddingTable& table) {
  const ModelOutput out = model.forward(tokens, table);
  Prediction p;
  if (out.sentiment) p.sentiment = out.sentiment->label;
  if (out.sarcasm) p.sarcasm = out.sarcasm->label;
  return p;
}

}  // namespace mtsa
