// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#include "mtsa/model.hpp"

#include <algorithm>

#include "mtsa/error.hpp"

namespace mtsa {

namespace {

struct VariantInfo {
  Variant variant;
  std::string_view name;
};

constexpr VariantInfo kVariantNames[] = {
    {Variant::kStandaloneSentiment, "standalone-sentiment"},
    {Variant::kStandaloneSarcasm, "standalone-sarcasm"},
    {Variant::kCoerced, "coerced"},
    {Variant::kMultiTaskSimple, "multitask-simple"},
    {Variant::kMultiTaskFusion, "multitask-fusion"},
    {Variant::kMultiTaskFusionSeparateGru, "multitask-fusion-separate-gru"},
    {Variant::kMultiTaskFusionSharedAttention, "shared-attention"},
};

TaskOutput to_task_output(Classification c) {
  return {std::move(c.logits), std::move(c.probs), c.label};
}

Tensor copy_param(const Tensor& t) { return t.detach(true); }

}  // namespace

std::string_view variant_name(Variant v) {
  for (const auto& info : kVariantNames)
    if (info.variant == v) return info.name;
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (const auto& info : kVariantNames)
    if (info.name == name) return info.variant;
  return std::nullopt;
}

bool variant_has_sentiment(Variant v) { return v != Variant::kStandaloneSarcasm; }
bool variant_has_sarcasm(Variant v) { return v != Variant::kStandaloneSentiment; }

bool variant_has_fusion(Variant v) {
  return v == Variant::kMultiTaskFusion || v == Variant::kMultiTaskFusionSeparateGru ||
         v == Variant::kMultiTaskFusionSharedAttention;
}

bool variant_has_attention(Variant v) { return v == Variant::kMultiTaskFusionSharedAttention; }

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* what) {
    if (v == 0) fail(ErrorKind::kConfig, std::string(what) + " must be positive");
  };
  positive(embedding_dim, "embedding_dim");
  positive(gru_dim, "gru_dim");
  positive(task_dim, "task_dim");
  positive(ntn_dim, "ntn_dim");
  positive(max_len, "max_len");
  if (classes < 2) fail(ErrorKind::kConfig, "classes must be at least 2");
  if (separate_gru && variant != Variant::kMultiTaskFusionSharedAttention) {
    fail(ErrorKind::kConfig, "separate_gru applies only to the shared-attention variant");
  }
}

Model Model::build(const ModelConfig& config, const EmbeddingTable& table) {
  if (table.dim() != config.embedding_dim) {
    fail(ErrorKind::kConfig, "embedding_dim " + std::to_string(config.embedding_dim) +
                                 " does not match embedding table dimension " +
                                 std::to_string(table.dim()));
  }
  return build(config);
}

Model Model::build(const ModelConfig& config) {
  config.validate();
  if (config.variant == Variant::kCoerced) {
    fail(ErrorKind::kConfig,
         "the coerced variant composes two standalone models and has no parameters of its own");
  }
  Model m(config);
  Rng rng(config.seed);
  const auto v = config.variant;
  const bool fusion = variant_has_fusion(v);

  m.gru_ = GruParams::init(config.embedding_dim, config.gru_dim, rng);
  if (v == Variant::kMultiTaskFusionSeparateGru || config.separate_gru) {
    m.gru_sar_ = GruParams::init(config.embedding_dim, config.gru_dim, rng);
  }
  if (m.has_sentiment()) m.proj_sen_ = ProjectionParams::init(config.gru_dim, config.task_dim, rng);
  if (m.has_sarcasm()) m.proj_sar_ = ProjectionParams::init(config.gru_dim, config.task_dim, rng);
  if (m.has_attention()) m.attention_ = AttentionParams::init(config.task_dim, config.max_len, rng);
  if (fusion) m.ntn_ = NtnParams::init(config.task_dim, config.ntn_dim, rng);
  if (m.has_sentiment()) m.head_sen_ = HeadParams::init(config.task_dim, config.classes, rng);
  if (m.has_sarcasm()) {
    const std::size_t width = config.task_dim + (fusion ? config.ntn_dim : 0);
    m.head_sar_ = HeadParams::init(width, config.classes, rng);
  }
  return m;
}

void Model::visit(const ParamVisitor& fn) const {
  // Parameter blocks hold shared handles, so visiting through a copy still
  // exposes the model's own storage.
  auto blk = [&](auto& opt, const char* prefix) {
    if (opt) {
      auto copy = *opt;
      copy.visit(prefix, fn);
    }
  };
  blk(gru_, gru_sar_ ? "gru_sen" : "gru");
  blk(gru_sar_, "gru_sar");
  blk(proj_sen_, "proj_sen");
  blk(proj_sar_, "proj_sar");
  blk(attention_, "attention");
  blk(ntn_, "ntn");
  blk(head_sen_, "head_sen");
  blk(head_sar_, "head_sar");
}

std::vector<NamedParam> Model::parameters() const {
  std::vector<NamedParam> out;
  visit([&](const std::string& name, Tensor& t) { out.push_back({name, t}); });
  return out;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.tensor.size();
  return n;
}

Model Model::clone() const {
  Model m(config_);
  auto deep = [](const auto& src, auto& dst) {
    if (!src) return;
    dst = *src;
    // Rebind every handle of the copy to fresh storage.
    dst->visit("", [](const std::string&, Tensor& t) { t = copy_param(t); });
  };
  deep(gru_, m.gru_);
  deep(gru_sar_, m.gru_sar_);
  deep(proj_sen_, m.proj_sen_);
  deep(proj_sar_, m.proj_sar_);
  deep(attention_, m.attention_);
  deep(ntn_, m.ntn_);
  deep(head_sen_, m.head_sen_);
  deep(head_sar_, m.head_sar_);
  return m;
}

ModelOutput Model::forward(const Tokens& tokens, const EmbeddingTable& table) const {
  if (table.dim() != config_.embedding_dim) {
    fail(ErrorKind::kDimension, "embedding table dimension " + std::to_string(table.dim()) +
                                    " does not match model D_g " +
                                    std::to_string(config_.embedding_dim));
  }
  return forward(embed_and_pad(tokens, table, config_.max_len));
}

ModelOutput Model::forward(const EmbeddedSentence& input) const {
  ModelOutput out;
  const GruOutput shared = gru_forward(input.x, input.mask, *gru_);
  const GruOutput own_sar =
      gru_sar_ ? gru_forward(input.x, input.mask, *gru_sar_) : GruOutput{};
  const GruOutput& enc_sar = gru_sar_ ? own_sar : shared;

  Tensor rep_sen, rep_sar;  // h_* or s_*
  if (has_attention()) {
    if (has_sentiment()) {
      auto att = mtsa::attention(task_projection(shared.h, *proj_sen_), input.mask, *attention_);
      rep_sen = att.s;
      out.alpha_sen = att.alpha;
    }
    if (has_sarcasm()) {
      auto att = mtsa::attention(task_projection(enc_sar.h, *proj_sar_), input.mask, *attention_);
      rep_sar = att.s;
      out.alpha_sar = att.alpha;
    }
  } else {
    if (has_sentiment()) rep_sen = task_projection(shared.last, *proj_sen_);
    if (has_sarcasm()) rep_sar = task_projection(enc_sar.last, *proj_sar_);
  }

  if (has_sentiment()) out.sentiment = to_task_output(classify(rep_sen, *head_sen_));
  if (has_sarcasm()) {
    Tensor sar_in = rep_sar;
    if (ntn_) sar_in = concat(rep_sar, ntn_fuse(rep_sar, rep_sen, *ntn_));
    out.sarcasm = to_task_output(classify(sar_in, *head_sar_));
  }
  return out;
}

int coerce(int sentiment_label, int sarcasm_label) {
  return sarcasm_label == 1 ? 0 : sentiment_label;
}

}  // namespace mtsa
