// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

// Stratified k-fold splitting, precision/recall/F-score and the
// cross-validation driver that produces per-variant result rows.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "mtsa/config.hpp"
#include "mtsa/data.hpp"
#include "mtsa/training.hpp"

namespace mtsa {

struct FoldPlan {
  std::vector<std::vector<std::size_t>> folds;  // sorted sample indices
  std::uint64_t seed = 0;

  std::size_t k() const { return folds.size(); }
  /// Every index outside fold `f`, sorted.
  std::vector<std::size_t> training_indices(std::size_t f, std::size_t corpus_size) const;
};

/// Joint (sentiment, sarcasm) stratification: each stratum is shuffled with
/// `seed` and the strata are dealt round-robin, so fold sizes differ by at
/// most one and every stratum is spread to within one sample per fold.
FoldPlan make_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed);

struct ConfusionMatrix {
  // counts[gold][predicted]
  std::array<std::array<std::size_t, 2>, 2> counts{};

  static ConfusionMatrix from(std::span<const int> predicted, std::span<const int> gold);
  std::size_t support(int cls) const { return counts[cls][0] + counts[cls][1]; }
  std::size_t predicted(int cls) const { return counts[0][cls] + counts[1][cls]; }
  std::size_t total() const { return support(0) + support(1); }
};

struct TaskMetrics {
  // Percentages in [0, 100].
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

/// Per-class P/R/F from the confusion matrix, combined by support-weighted or
/// macro averaging. Classes with no predictions have precision 0.
TaskMetrics evaluate(std::span<const int> predicted, std::span<const int> gold,
                     Averaging averaging = Averaging::kWeighted);

struct FoldPredictions {
  std::vector<int> sentiment;  // empty when the task is not predicted
  std::vector<int> sarcasm;
};

/// Trains on `train` and predicts labels for `test` (indices into the corpus).
using FoldRunner = std::function<FoldPredictions(
    std::size_t fold, std::span<const std::size_t> train, std::span<const std::size_t> test)>;

struct FoldResult {
  std::size_t fold = 0;
  std::size_t test_size = 0;
  std::optional<TaskMetrics> sentiment;
  std::optional<TaskMetrics> sarcasm;
};

struct EvalReport {
  std::string variant;
  std::optional<TaskMetrics> sentiment;  // means over folds
  std::optional<TaskMetrics> sarcasm;
  std::optional<double> average_f;       // present when both tasks are
  std::vector<FoldResult> folds;
  std::uint64_t fold_seed = 0;
  std::string stratification = "joint(sentiment,sarcasm)";
  Averaging averaging = Averaging::kWeighted;

  nlohmann::json to_json() const;
  /// One result row with a header line.
  std::string to_table() const;
};

/// Runs `runner` over every fold (up to `jobs` folds concurrently) and
/// averages the per-fold metrics.
EvalReport cross_validate(const Corpus& corpus, const FoldPlan& plan, const FoldRunner& runner,
                          Averaging averaging, std::size_t jobs = 1);

/// Called with each trained fold model; the coerced variant reports its two
/// standalone models with `role` "sentiment" and "sarcasm".
using FoldModelSink =
    std::function<void(std::size_t fold, const std::string& role, const Model& model)>;

/// Full pipeline: folds from config.evaluation, a freshly built model per
/// fold trained with config.train, evaluation on the held-out fold. Seeds of
/// fold f are the configured seeds plus f.
EvalReport cross_validate(const Corpus& corpus, const EmbeddingTable& table,
                          const RunConfig& config, std::size_t jobs = 1,
                          const FoldModelSink& sink = {});

/// Examples for the given corpus indices.
std::vector<Example> make_examples(const Corpus& corpus, std::span<const std::size_t> indices);

/// Trains one model of config.model.variant (not kCoerced) on `examples`.
Model train_model(const RunConfig& config, std::span<const Example> examples,
                  const EmbeddingTable& table, const EpochCallback& on_epoch = {});

}  // namespace mtsa
