// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

// Declarative run configuration. Every knob has a default; the resolved
// configuration (defaults included) is what gets echoed into manifests and
// checkpoints.

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "json.hpp"
#include "mtsa/model.hpp"
#include "mtsa/training.hpp"

namespace mtsa {

enum class Averaging { kWeighted, kMacro };

std::string_view averaging_name(Averaging a);
std::optional<Averaging> parse_averaging(std::string_view name);

struct EvaluationConfig {
  std::size_t folds = 10;
  std::uint64_t fold_seed = 1;
  Averaging averaging = Averaging::kWeighted;
};

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  EvaluationConfig evaluation;

  void validate() const;
};

nlohmann::json model_config_to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunConfig& c);
/// Missing keys keep their defaults; unknown keys and ill-typed values are
/// config errors.
RunConfig run_config_from_json(const nlohmann::json& j);

}  // namespace mtsa
