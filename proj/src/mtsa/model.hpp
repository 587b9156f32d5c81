// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtsa/layers.hpp"

namespace mtsa {

enum class Variant {
  kStandaloneSentiment,
  kStandaloneSarcasm,
  kCoerced,  // two standalone models composed by coerce()
  kMultiTaskSimple,
  kMultiTaskFusion,
  kMultiTaskFusionSeparateGru,
  kMultiTaskFusionSharedAttention,
};

inline constexpr Variant kAllVariants[] = {
    Variant::kStandaloneSentiment,         Variant::kStandaloneSarcasm,
    Variant::kCoerced,                     Variant::kMultiTaskSimple,
    Variant::kMultiTaskFusion,             Variant::kMultiTaskFusionSeparateGru,
    Variant::kMultiTaskFusionSharedAttention,
};

std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

bool variant_has_sentiment(Variant v);
bool variant_has_sarcasm(Variant v);
bool variant_has_fusion(Variant v);
bool variant_has_attention(Variant v);

struct ModelConfig {
  Variant variant = Variant::kMultiTaskFusionSharedAttention;
  std::size_t embedding_dim = 300;  // D_g
  std::size_t gru_dim = 500;        // D_gru
  std::size_t task_dim = 300;       // D_t
  std::size_t ntn_dim = 100;        // D_ntn
  std::size_t classes = 2;          // C
  std::size_t max_len = 0;          // L, set from the corpus
  // Shared-attention ablation: one GRU per task instead of a shared one.
  bool separate_gru = false;
  std::uint64_t seed = 1;

  /// Throws kConfig on non-positive extents or an unknown L.
  void validate() const;
};

struct TaskOutput {
  Tensor logits;  // C
  Tensor probs;   // C
  int label = 0;
};

struct ModelOutput {
  std::optional<TaskOutput> sentiment;
  std::optional<TaskOutput> sarcasm;
  Tensor alpha_sen;  // L; defined only for attention models
  Tensor alpha_sar;
};

struct NamedParam {
  std::string name;
  Tensor tensor;  // shares storage with the model
};

class Model {
 public:
  /// Creates the parameter set of `config.variant` with seeded Xavier
  /// initialisation. The embedding table fixes D_g.
  static Model build(const ModelConfig& config, const EmbeddingTable& table);
  /// Same, trusting config.embedding_dim (used when restoring checkpoints).
  static Model build(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  Variant variant() const { return config_.variant; }
  bool has_sentiment() const { return variant_has_sentiment(config_.variant); }
  bool has_sarcasm() const { return variant_has_sarcasm(config_.variant); }
  bool has_attention() const { return variant_has_attention(config_.variant); }

  ModelOutput forward(const EmbeddedSentence& input) const;
  ModelOutput forward(const Tokens& tokens, const EmbeddingTable& table) const;

  /// Trainable tensors in a fixed order. Handles alias the model's storage.
  std::vector<NamedParam> parameters() const;
  std::size_t parameter_count() const;

  /// Deep copy of every parameter.
  Model clone() const;

  // Direct access for tests and tools.
  std::optional<GruParams>& gru() { return gru_; }
  std::optional<GruParams>& gru_sar() { return gru_sar_; }
  std::optional<ProjectionParams>& proj_sen() { return proj_sen_; }
  std::optional<ProjectionParams>& proj_sar() { return proj_sar_; }
  std::optional<AttentionParams>& attention() { return attention_; }
  std::optional<NtnParams>& ntn() { return ntn_; }
  std::optional<HeadParams>& head_sen() { return head_sen_; }
  std::optional<HeadParams>& head_sar() { return head_sar_; }

 private:
  explicit Model(ModelConfig config) : config_(std::move(config)) {}
  void visit(const ParamVisitor& fn) const;

  ModelConfig config_;
  // gru_ is shared by both tasks; when tasks have their own encoders gru_
  // serves sentiment and gru_sar_ serves sarcasm.
  std::optional<GruParams> gru_;
  std::optional<GruParams> gru_sar_;
  std::optional<ProjectionParams> proj_sen_;
  std::optional<ProjectionParams> proj_sar_;
  std::optional<AttentionParams> attention_;
  std::optional<NtnParams> ntn_;
  std::optional<HeadParams> head_sen_;
  std::optional<HeadParams> head_sar_;
};

/// Sentiment after coercion by the sarcasm decision: sarcastic inputs are
/// forced to negative (0); otherwise the sentiment label is returned as is.
int coerce(int sentiment_label, int sarcasm_label);

}  // namespace mtsa
