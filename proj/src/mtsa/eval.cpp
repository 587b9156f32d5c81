// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#include "mtsa/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "mtsa/error.hpp"

namespace mtsa {

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

nlohmann::json metrics_json(const TaskMetrics& m) {
  return {{"precision", round2(m.precision)},
          {"recall", round2(m.recall)},
          {"f_score", round2(m.f_score)}};
}

TaskMetrics mean_metrics(const std::vector<TaskMetrics>& all) {
  TaskMetrics out;
  for (const auto& m : all) {
    out.precision += m.precision;
    out.recall += m.recall;
    out.f_score += m.f_score;
  }
  const double n = static_cast<double>(all.size());
  out.precision /= n;
  out.recall /= n;
  out.f_score /= n;
  return out;
}

std::vector<int> gather(const Corpus& corpus, std::span<const std::size_t> idx, int Sample::*label) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(corpus.samples[i].*label);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Folds

std::vector<std::size_t> FoldPlan::training_indices(std::size_t f, std::size_t corpus_size) const {
  std::vector<bool> held_out(corpus_size, false);
  for (auto i : folds.at(f)) held_out[i] = true;
  std::vector<std::size_t> out;
  out.reserve(corpus_size - folds[f].size());
  for (std::size_t i = 0; i < corpus_size; ++i)
    if (!held_out[i]) out.push_back(i);
  return out;
}

FoldPlan make_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
  if (k == 0) fail(ErrorKind::kInput, "make_folds: k must be positive");
  if (corpus.size() < k) {
    fail(ErrorKind::kInput, "make_folds: corpus of " + std::to_string(corpus.size()) +
                                " samples cannot form " + std::to_string(k) + " folds");
  }
  std::array<std::vector<std::size_t>, 4> strata;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& s = corpus.samples[i];
    strata[static_cast<std::size_t>(s.sentiment * 2 + s.sarcasm)].push_back(i);
  }
  Rng rng(seed);
  FoldPlan plan;
  plan.seed = seed;
  plan.folds.resize(k);
  std::size_t dealt = 0;
  for (auto& stratum : strata) {
    std::shuffle(stratum.begin(), stratum.end(), rng);
    for (auto i : stratum) plan.folds[dealt++ % k].push_back(i);
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

// ---------------------------------------------------------------------------
// Metrics

ConfusionMatrix ConfusionMatrix::from(std::span<const int> predicted, std::span<const int> gold) {
  if (predicted.size() != gold.size()) {
    fail(ErrorKind::kInput, "evaluate: " + std::to_string(predicted.size()) +
                                " predictions for " + std::to_string(gold.size()) +
                                " gold labels");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if ((gold[i] != 0 && gold[i] != 1) || (predicted[i] != 0 && predicted[i] != 1)) {
      fail(ErrorKind::kInput, "evaluate: labels must be 0 or 1");
    }
    ++cm.counts[gold[i]][predicted[i]];
  }
  return cm;
}

TaskMetrics evaluate(std::span<const int> predicted, std::span<const int> gold,
                     Averaging averaging) {
  const ConfusionMatrix cm = ConfusionMatrix::from(predicted, gold);
  if (cm.total() == 0) fail(ErrorKind::kInput, "evaluate: no samples");
  TaskMetrics out;
  for (int c = 0; c < 2; ++c) {
    const double tp = static_cast<double>(cm.counts[c][c]);
    const double pred = static_cast<double>(cm.predicted(c));
    const double support = static_cast<double>(cm.support(c));
    const double p = pred > 0 ? tp / pred : 0.0;
    const double r = support > 0 ? tp / support : 0.0;
    const double f = (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0;
    const double w = averaging == Averaging::kWeighted
                         ? support / static_cast<double>(cm.total())
                         : 0.5;
    out.precision += w * p;
    out.recall += w * r;
    out.f_score += w * f;
  }
  out.precision *= 100.0;
  out.recall *= 100.0;
  out.f_score *= 100.0;
  return out;
}

// ---------------------------------------------------------------------------
// Reports

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["variant"] = variant;
  if (sentiment) j["sentiment"] = metrics_json(*sentiment);
  if (sarcasm) j["sarcasm"] = metrics_json(*sarcasm);
  if (average_f) j["average_f"] = round2(*average_f);
  j["folds"] = folds.size();
  j["fold_seed"] = fold_seed;
  j["stratification"] = stratification;
  j["averaging"] = std::string(averaging_name(averaging));
  auto per_fold = nlohmann::json::array();
  for (const auto& f : folds) {
    nlohmann::json row{{"fold", f.fold}, {"test_size", f.test_size}};
    if (f.sentiment) row["sentiment"] = metrics_json(*f.sentiment);
    if (f.sarcasm) row["sarcasm"] = metrics_json(*f.sarcasm);
    per_fold.push_back(std::move(row));
  }
  j["per_fold"] = std::move(per_fold);
  return j;
}

std::string EvalReport::to_table() const {
  auto cell = [](const std::optional<TaskMetrics>& m, double TaskMetrics::*field) {
    char buf[32];
    if (!m) return std::string("--");
    std::snprintf(buf, sizeof buf, "%.2f", (*m).*field);
    return std::string(buf);
  };
  char avg[32] = "--";
  if (average_f) std::snprintf(avg, sizeof avg, "%.2f", *average_f);
  std::string out =
      "variant | sen P | sen R | sen F | sar P | sar R | sar F | avg F\n";
  out += variant + " | " + cell(sentiment, &TaskMetrics::precision) + " | " +
         cell(sentiment, &TaskMetrics::recall) + " | " + cell(sentiment, &TaskMetrics::f_score) +
         " | " + cell(sarcasm, &TaskMetrics::precision) + " | " +
         cell(sarcasm, &TaskMetrics::recall) + " | " + cell(sarcasm, &TaskMetrics::f_score) +
         " | " + avg + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Cross-validation

EvalReport cross_validate(const Corpus& corpus, const FoldPlan& plan, const FoldRunner& runner,
                          Averaging averaging, std::size_t jobs) {
  const std::size_t k = plan.k();
  if (k == 0) fail(ErrorKind::kInput, "cross_validate: empty fold plan");
  std::vector<FoldPredictions> predictions(k);
  std::vector<std::exception_ptr> errors(k);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t f = next++; f < k; f = next++) {
      try {
        const auto train = plan.training_indices(f, corpus.size());
        predictions[f] = runner(f, train, plan.folds[f]);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, k);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t f = 0; f < k; ++f) {
    if (!errors[f]) continue;
    try {
      std::rethrow_exception(errors[f]);
    } catch (const Error& e) {
      fail(e.kind(), "fold " + std::to_string(f) + ": " + e.what());
    }
  }

  EvalReport report;
  report.fold_seed = plan.seed;
  report.averaging = averaging;
  std::vector<TaskMetrics> sen_all, sar_all;
  for (std::size_t f = 0; f < k; ++f) {
    const auto& test = plan.folds[f];
    FoldResult r;
    r.fold = f;
    r.test_size = test.size();
    if (!predictions[f].sentiment.empty()) {
      r.sentiment = evaluate(predictions[f].sentiment, gather(corpus, test, &Sample::sentiment),
                             averaging);
      sen_all.push_back(*r.sentiment);
    }
    if (!predictions[f].sarcasm.empty()) {
      r.sarcasm = evaluate(predictions[f].sarcasm, gather(corpus, test, &Sample::sarcasm),
                           averaging);
      sar_all.push_back(*r.sarcasm);
    }
    report.folds.push_back(r);
  }
  if (!sen_all.empty()) report.sentiment = mean_metrics(sen_all);
  if (!sar_all.empty()) report.sarcasm = mean_metrics(sar_all);
  if (report.sentiment && report.sarcasm) {
    report.average_f = (report.sentiment->f_score + report.sarcasm->f_score) / 2.0;
  }
  return report;
}

std::vector<Example> make_examples(const Corpus& corpus, std::span<const std::size_t> indices) {
  std::vector<Example> out;
  out.reserve(indices.size());
  for (auto i : indices) {
    const auto& s = corpus.samples.at(i);
    out.push_back({s.tokens, s.sentiment, s.sarcasm});
  }
  return out;
}

Model train_model(const RunConfig& config, std::span<const Example> examples,
                  const EmbeddingTable& table, const EpochCallback& on_epoch) {
  Model model = Model::build(config.model, table);
  train(model, examples, table, config.train, on_epoch);
  return model;
}

EvalReport cross_validate(const Corpus& corpus, const EmbeddingTable& table,
                          const RunConfig& config, std::size_t jobs, const FoldModelSink& sink) {
  config.validate();
  RunConfig base = config;
  if (base.model.max_len == 0) base.model.max_len = corpus.max_len;
  if (base.model.max_len < corpus.max_len) {
    fail(ErrorKind::kConfig, "max_len " + std::to_string(base.model.max_len) +
                                 " is shorter than the longest sentence (" +
                                 std::to_string(corpus.max_len) + " tokens)");
  }
  const FoldPlan plan = make_folds(corpus, base.evaluation.folds, base.evaluation.fold_seed);
  const Variant variant = base.model.variant;

  auto fold_config = [&](std::size_t f, Variant v) {
    RunConfig c = base;
    c.model.variant = v;
    c.model.seed = base.model.seed + f;
    c.train.seed = base.train.seed + f;
    return c;
  };
  auto predict_all = [&](const Model& m, std::span<const std::size_t> test) {
    FoldPredictions p;
    for (auto i : test) {
      const Prediction pr = predict(m, corpus.samples[i].tokens, table);
      if (pr.sentiment >= 0) p.sentiment.push_back(pr.sentiment);
      if (pr.sarcasm >= 0) p.sarcasm.push_back(pr.sarcasm);
    }
    return p;
  };

  const FoldRunner runner = [&](std::size_t f, std::span<const std::size_t> train_idx,
                                std::span<const std::size_t> test) {
    const auto examples = make_examples(corpus, train_idx);
    if (variant != Variant::kCoerced) {
      Model m = train_model(fold_config(f, variant), examples, table);
      if (sink) sink(f, std::string(variant_name(variant)), m);
      return predict_all(m, test);
    }
    Model sen = train_model(fold_config(f, Variant::kStandaloneSentiment), examples, table);
    Model sar = train_model(fold_config(f, Variant::kStandaloneSarcasm), examples, table);
    if (sink) {
      sink(f, "sentiment", sen);
      sink(f, "sarcasm", sar);
    }
    FoldPredictions p;
    const auto sen_pred = predict_all(sen, test).sentiment;
    const auto sar_pred = predict_all(sar, test).sarcasm;
    for (std::size_t i = 0; i < test.size(); ++i) {
      p.sentiment.push_back(coerce(sen_pred[i], sar_pred[i]));
    }
    return p;
  };

  EvalReport report = cross_validate(corpus, plan, runner, base.evaluation.averaging, jobs);
  report.variant = std::string(variant_name(variant));
  return report;
}

}  // namespace mtsa
