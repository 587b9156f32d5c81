// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#include "mtsa/config.hpp"

#include <set>
#include <string>

#include "mtsa/error.hpp"

namespace mtsa {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const char* section, const std::set<std::string>& known) {
  if (!j.is_object()) fail(ErrorKind::kConfig, std::string(section) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      fail(ErrorKind::kConfig, std::string("unknown key '") + key + "' in " + section);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kConfig, std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

std::string_view averaging_name(Averaging a) {
  return a == Averaging::kMacro ? "macro" : "weighted";
}

std::optional<Averaging> parse_averaging(std::string_view name) {
  if (name == "weighted") return Averaging::kWeighted;
  if (name == "macro") return Averaging::kMacro;
  return std::nullopt;
}

void RunConfig::validate() const {
  // max_len may still be unknown before the corpus is read.
  ModelConfig probe = model;
  if (probe.max_len == 0) probe.max_len = 1;
  if (probe.variant == Variant::kCoerced) probe.variant = Variant::kStandaloneSentiment;
  probe.validate();
  train.validate();
  if (evaluation.folds == 0) fail(ErrorKind::kConfig, "evaluation.folds must be positive");
}

json model_config_to_json(const ModelConfig& c) {
  return {{"variant", std::string(variant_name(c.variant))},
          {"embedding_dim", c.embedding_dim},
          {"gru_dim", c.gru_dim},
          {"task_dim", c.task_dim},
          {"ntn_dim", c.ntn_dim},
          {"classes", c.classes},
          {"max_len", c.max_len},
          {"separate_gru", c.separate_gru},
          {"seed", c.seed}};
}

ModelConfig model_config_from_json(const json& j) {
  reject_unknown(j, "model",
                 {"variant", "embedding_dim", "gru_dim", "task_dim", "ntn_dim", "classes",
                  "max_len", "separate_gru", "seed"});
  ModelConfig c;
  std::string variant(variant_name(c.variant));
  read(j, "variant", variant);
  const auto v = parse_variant(variant);
  if (!v) fail(ErrorKind::kConfig, "unknown variant '" + variant + "'");
  c.variant = *v;
  read(j, "embedding_dim", c.embedding_dim);
  read(j, "gru_dim", c.gru_dim);
  read(j, "task_dim", c.task_dim);
  read(j, "ntn_dim", c.ntn_dim);
  read(j, "classes", c.classes);
  read(j, "max_len", c.max_len);
  read(j, "separate_gru", c.separate_gru);
  read(j, "seed", c.seed);
  return c;
}

json to_json(const RunConfig& c) {
  const auto& t = c.train;
  return {{"model", model_config_to_json(c.model)},
          {"train",
           {{"learning_rate", t.learning_rate},
            {"beta1", t.beta1},
            {"beta2", t.beta2},
            {"epsilon", t.epsilon},
            {"epochs", t.epochs},
            {"batch_size", t.batch_size},
            {"seed", t.seed},
            {"weight_sentiment", t.weight_sentiment},
            {"weight_sarcasm", t.weight_sarcasm}}},
          {"evaluation",
           {{"folds", c.evaluation.folds},
            {"fold_seed", c.evaluation.fold_seed},
            {"averaging", std::string(averaging_name(c.evaluation.averaging))}}}};
}

RunConfig run_config_from_json(const json& j) {
  reject_unknown(j, "config", {"model", "train", "evaluation"});
  RunConfig c;
  if (j.contains("model")) c.model = model_config_from_json(j.at("model"));
  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown(t, "train",
                   {"learning_rate", "beta1", "beta2", "epsilon", "epochs", "batch_size", "seed",
                    "weight_sentiment", "weight_sarcasm"});
    read(t, "learning_rate", c.train.learning_rate);
    read(t, "beta1", c.train.beta1);
    read(t, "beta2", c.train.beta2);
    read(t, "epsilon", c.train.epsilon);
    read(t, "epochs", c.train.epochs);
    read(t, "batch_size", c.train.batch_size);
    read(t, "seed", c.train.seed);
    read(t, "weight_sentiment", c.train.weight_sentiment);
    read(t, "weight_sarcasm", c.train.weight_sarcasm);
  }
  if (j.contains("evaluation")) {
    const json& e = j.at("evaluation");
    reject_unknown(e, "evaluation", {"folds", "fold_seed", "averaging"});
    read(e, "folds", c.evaluation.folds);
    read(e, "fold_seed", c.evaluation.fold_seed);
    std::string avg(averaging_name(c.evaluation.averaging));
    read(e, "averaging", avg);
    const auto a = parse_averaging(avg);
    if (!a) fail(ErrorKind::kConfig, "unknown averaging '" + avg + "'");
    c.evaluation.averaging = *a;
  }
  c.validate();
  return c;
}

}  // namespace mtsa
