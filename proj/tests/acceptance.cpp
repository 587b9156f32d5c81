// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mtsa/checkpoint.hpp"
#include "mtsa/error.hpp"
#include "mtsa/eval.hpp"
#include "mtsa/model.hpp"
#include "mtsa/synthetic.hpp"
#include "mtsa/training.hpp"

namespace {

using namespace mtsa;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Tensor random_tensor(Shape shape, std::mt19937_64& rng, bool grad, double lo = -1.0,
                     double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = d(rng);
  return Tensor::from_values(std::move(shape), std::move(v), grad);
}

// ---------------------------------------------------------------------------
// 1. Gradient correctness

constexpr std::size_t kDg = 5, kDgru = 7, kDt = 4, kDntn = 3, kL = 3;

ModelConfig toy_config(Variant v) {
  ModelConfig c;
  c.variant = v;
  c.embedding_dim = kDg;
  c.gru_dim = kDgru;
  c.task_dim = kDt;
  c.ntn_dim = kDntn;
  c.max_len = kL;
  return c;
}

struct OpCase {
  std::string name;
  // Builds fresh leaves and returns the scalar objective over them.
  std::function<std::function<Tensor()>(std::mt19937_64&, std::vector<Tensor>&)> make;
};

// Contracts a non-scalar output with fixed random weights so that every
// output coordinate contributes to the checked scalar.
Tensor contract(const Tensor& out, const Tensor& probe) { return sum(mul(out, probe)); }

std::function<Tensor()> probed(std::function<Tensor()> op, Shape shape, std::mt19937_64& rng) {
  Tensor probe = random_tensor(std::move(shape), rng, false);
  return [op = std::move(op), probe] { return contract(op(), probe); };
}

Mask random_mask(std::mt19937_64& rng, std::size_t len) {
  Mask m(len, false);
  const std::size_t live = 1 + rng() % len;
  for (std::size_t i = 0; i < live; ++i) m[i] = true;
  return m;
}

std::vector<OpCase> op_cases() {
  std::vector<OpCase> cases;
  auto unary = [&](std::string name, Tensor (*op)(const Tensor&)) {
    cases.push_back({name, [op](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                       leaves = {random_tensor({3, 4}, rng, true, -2, 2)};
                       Tensor a = leaves[0];
                       return probed([a, op] { return op(a); }, {3, 4}, rng);
                     }});
  };
  unary("tanh", &mtsa::tanh);
  unary("sigmoid", &mtsa::sigmoid);
  unary("relu", &mtsa::relu);
  auto binary = [&](std::string name, Tensor (*op)(const Tensor&, const Tensor&), Shape rhs) {
    cases.push_back({name, [op, rhs](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                       leaves = {random_tensor({3, 4}, rng, true), random_tensor(rhs, rng, true)};
                       Tensor a = leaves[0], b = leaves[1];
                       return probed([a, b, op] { return op(a, b); }, {3, 4}, rng);
                     }});
  };
  binary("add", &mtsa::add, {3, 4});
  binary("add(broadcast)", &mtsa::add, {4});
  binary("sub", &mtsa::sub, {3, 4});
  binary("mul", &mtsa::mul, {3, 4});
  cases.push_back({"scale", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     leaves = {random_tensor({5}, rng, true)};
                     Tensor a = leaves[0];
                     return probed([a] { return scale(a, -1.7); }, {5}, rng);
                   }});
  cases.push_back({"matmul", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     leaves = {random_tensor({3, 5}, rng, true), random_tensor({5, 2}, rng, true)};
                     Tensor a = leaves[0], b = leaves[1];
                     return probed([a, b] { return matmul(a, b); }, {3, 2}, rng);
                   }});
  cases.push_back({"matmul(vector)", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     leaves = {random_tensor({5}, rng, true), random_tensor({5, 3}, rng, true)};
                     Tensor a = leaves[0], b = leaves[1];
                     return probed([a, b] { return matmul(a, b); }, {3}, rng);
                   }});
  cases.push_back({"softmax(masked)", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     leaves = {random_tensor({kL}, rng, true, -3, 3)};
                     Tensor a = leaves[0];
                     const Mask m = random_mask(rng, kL);
                     return probed([a, m] { return softmax(a, m); }, {kL}, rng);
                   }});
  cases.push_back({"softmax(rows)", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     leaves = {random_tensor({2, 4}, rng, true, -3, 3)};
                     Tensor a = leaves[0];
                     return probed([a] { return softmax(a); }, {2, 4}, rng);
                   }});
  cases.push_back({"concat", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     leaves = {random_tensor({kDt}, rng, true), random_tensor({kDntn}, rng, true)};
                     Tensor a = leaves[0], b = leaves[1];
                     return probed([a, b] { return concat(a, b); }, {kDt + kDntn}, rng);
                   }});
  cases.push_back({"bilinear", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     leaves = {random_tensor({kDt}, rng, true),
                               random_tensor({kDntn, kDt, kDt}, rng, true),
                               random_tensor({kDt}, rng, true)};
                     Tensor u = leaves[0], t = leaves[1], v = leaves[2];
                     return probed([u, t, v] { return bilinear(u, t, v); }, {kDntn}, rng);
                   }});
  cases.push_back({"row+stack_rows", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     leaves = {random_tensor({3, 4}, rng, true)};
                     Tensor a = leaves[0];
                     return probed(
                         [a] {
                           return stack_rows({row(a, 2), Tensor(), row(a, 0)}, 4);
                         },
                         {3, 4}, rng);
                   }});
  cases.push_back({"reshape", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     leaves = {random_tensor({2, 6}, rng, true)};
                     Tensor a = leaves[0];
                     return probed([a] { return reshape(a, {3, 4}); }, {3, 4}, rng);
                   }});
  cases.push_back({"softmax_cross_entropy", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     leaves = {random_tensor({4, 2}, rng, true, -3, 3)};
                     Tensor a = leaves[0];
                     std::vector<int> labels(4);
                     for (auto& l : labels) l = static_cast<int>(rng() % 2);
                     return std::function<Tensor()>(
                         [a, labels] { return softmax_cross_entropy(a, labels); });
                   }});
  // Layer blocks at toy size.
  cases.push_back({"gru", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     Rng init(rng());
                     GruParams p = GruParams::init(kDg, kDgru, init);
                     p.bz = random_tensor({kDgru}, rng, true);
                     p.br = random_tensor({kDgru}, rng, true);
                     p.bh = random_tensor({kDgru}, rng, true);
                     Tensor x = random_tensor({kL, kDg}, rng, true);
                     leaves = {x, p.wz, p.wr, p.wh, p.uz, p.ur, p.uh, p.bz, p.br, p.bh};
                     const Mask m = random_mask(rng, kL);
                     return probed(
                         [x, p, m] {
                           auto o = gru_forward(x, m, p);
                           return concat(reshape(o.h, {kL * kDgru}), o.last);
                         },
                         {kL * kDgru + kDgru}, rng);
                   }});
  cases.push_back({"task_projection", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     ProjectionParams p{random_tensor({kDgru, kDt}, rng, true),
                                        random_tensor({kDt}, rng, true)};
                     Tensor h = random_tensor({kL, kDgru}, rng, true);
                     leaves = {h, p.w, p.b};
                     return probed([h, p] { return task_projection(h, p); }, {kL, kDt}, rng);
                   }});
  cases.push_back({"attention", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     AttentionParams p{random_tensor({kDt, 1}, rng, true),
                                       random_tensor({kL, kL}, rng, true)};
                     Tensor h = random_tensor({kL, kDt}, rng, true);
                     leaves = {h, p.w_att, p.w_alpha};
                     const Mask m = random_mask(rng, kL);
                     return probed(
                         [h, p, m] {
                           auto o = attention(h, m, p);
                           return concat(o.s, o.alpha);
                         },
                         {kDt + kL}, rng);
                   }});
  cases.push_back({"ntn_fuse", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     NtnParams p{random_tensor({kDntn, kDt, kDt}, rng, true),
                                 random_tensor({2 * kDt, kDntn}, rng, true),
                                 random_tensor({kDntn}, rng, true)};
                     Tensor a = random_tensor({kDt}, rng, true), b = random_tensor({kDt}, rng, true);
                     leaves = {a, b, p.t, p.w, p.b};
                     return probed([a, b, p] { return ntn_fuse(a, b, p); }, {kDntn}, rng);
                   }});
  cases.push_back({"classify", [](std::mt19937_64& rng, std::vector<Tensor>& leaves) {
                     HeadParams p{random_tensor({kDt, 2}, rng, true), random_tensor({2}, rng, true)};
                     Tensor s = random_tensor({kDt}, rng, true);
                     leaves = {s, p.w, p.b};
                     return probed([s, p] { return classify(s, p).probs; }, {2}, rng);
                   }});
  return cases;
}

Outcome criterion_gradients() {
  Outcome out;
  const auto start = Clock::now();
  constexpr int kSeeds = 5;
  double worst_op = 0.0;
  std::size_t checked = 0, skipped = 0;
  for (const auto& c : op_cases()) {
    for (int seed = 0; seed < kSeeds; ++seed) {
      std::mt19937_64 rng(1000 + seed);
      std::vector<Tensor> leaves;
      auto f = c.make(rng, leaves);
      GradCheckOptions opts;
      opts.tolerance = 1e-4;
      const auto r = grad_check(f, leaves, opts);
      checked += r.checked;
      skipped += r.skipped;
      worst_op = std::max(worst_op, r.max_rel_error);
      out.require(r.passed() && r.checked > 0,
                  c.name + " seed " + std::to_string(seed) + " max rel " +
                      fmt("%.3g", r.max_rel_error));
    }
  }
  double worst_model = 0.0;
  for (auto v : kAllVariants) {
    if (v == Variant::kCoerced) continue;
    for (int seed = 0; seed < 3; ++seed) {
      auto cfg = toy_config(v);
      cfg.seed = 50 + seed;
      auto m = Model::build(cfg);
      std::mt19937_64 rng(77 + seed);
      std::uniform_real_distribution<double> wide(-0.8, 0.8), unit(-1.0, 1.0);
      for (auto& p : m.parameters()) {
        for (auto& x : p.tensor.mutable_values()) x = wide(rng);
      }
      const std::size_t len = 1 + seed % kL;
      std::vector<double> xs(kL * kDg, 0.0);
      for (std::size_t i = 0; i < len * kDg; ++i) xs[i] = unit(rng);
      EmbeddedSentence in{Tensor::from_values({kL, kDg}, xs), Mask(kL, false)};
      for (std::size_t i = 0; i < len; ++i) in.mask[i] = true;
      const int sen[] = {static_cast<int>(rng() % 2)};
      const int sar[] = {static_cast<int>(rng() % 2)};
      std::vector<Tensor> leaves;
      for (auto& p : m.parameters()) leaves.push_back(p.tensor);
      auto f = [&] {
        auto o = m.forward(in);
        Tensor loss = Tensor::scalar(0.0);
        if (o.sentiment) loss = add(loss, softmax_cross_entropy(o.sentiment->logits, sen));
        if (o.sarcasm) loss = add(loss, softmax_cross_entropy(o.sarcasm->logits, sar));
        return loss;
      };
      GradCheckOptions opts;
      opts.tolerance = 1e-3;
      const auto r = grad_check(f, leaves, opts);
      checked += r.checked;
      skipped += r.skipped;
      worst_model = std::max(worst_model, r.max_rel_error);
      out.require(r.passed() && r.checked > m.parameter_count() / 2,
                  std::string(variant_name(v)) + " seed " + std::to_string(seed) + " max rel " +
                      fmt("%.3g", r.max_rel_error));
    }
  }
  const double secs = seconds_since(start);
  out.require(secs < 60.0, "runtime " + fmt("%.1f s", secs) + " exceeds 60 s");
  out.note("ops max rel err " + fmt("%.2e", worst_op) + " (< 1e-4), models max rel err " +
           fmt("%.2e", worst_model) + " (< 1e-3), " + std::to_string(checked) +
           " coordinates checked, " + std::to_string(skipped) + " at ReLU kinks skipped, " +
           fmt("%.1f s", secs));
  return out;
}

// ---------------------------------------------------------------------------
// 2. Analytic fixed points

Outcome criterion_fixed_points() {
  Outcome out;
  std::mt19937_64 rng(2);
  double worst_sum = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const Mask m = random_mask(rng, n);
    const double spread = trial % 2 ? 1.0 : 500.0;
    auto p = softmax(random_tensor({n}, rng, false, -spread, spread), m);
    double s = 0.0;
    for (double v : p.values()) s += v;
    worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    AttentionParams ap{random_tensor({kDt, 1}, rng, false), random_tensor({n, n}, rng, false)};
    auto a = attention(random_tensor({n, kDt}, rng, false), m, ap);
    s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += a.alpha(i);
      out.require(m[i] || a.alpha(i) == 0.0, "masked attention weight is non-zero");
    }
    worst_sum = std::max(worst_sum, std::abs(s - 1.0));
  }
  out.require(worst_sum <= 1e-9, "normalisation error " + fmt("%.3g", worst_sum));

  NtnParams zero{Tensor::zeros({kDntn, kDt, kDt}), Tensor::zeros({2 * kDt, kDntn}),
                 Tensor::zeros({kDntn})};
  double ntn_max = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    auto y = ntn_fuse(random_tensor({kDt}, rng, false, -5, 5),
                      random_tensor({kDt}, rng, false, -5, 5), zero);
    for (double v : y.values()) ntn_max = std::max(ntn_max, std::abs(v));
  }
  out.require(ntn_max == 0.0, "zero NTN output " + fmt("%.3g", ntn_max));

  double ce_err = 0.0;
  for (double c : {0.0, 3.5, -120.0}) {
    for (int label : {0, 1}) {
      const int l[] = {label};
      ce_err = std::max(ce_err, std::abs(softmax_cross_entropy(Tensor::from_values({2}, {c, c}), l)
                                             .item() -
                                         std::log(2.0)));
    }
  }
  out.require(ce_err <= 1e-12, "uniform cross-entropy error " + fmt("%.3g", ce_err));

  TrainConfig cfg;
  const std::vector<double> g = {3.0, -0.25, 1e-3, -40.0, 7e-6, -1e4};
  std::vector<NamedParam> params = {
      {"theta", Tensor::from_values({g.size()}, std::vector<double>(g.size(), 0.5), true)}};
  std::copy(g.begin(), g.end(), params[0].tensor.mutable_grad().begin());
  AdamState state;
  adam_step(params, state, cfg);
  double adam_excess = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double step = params[0].tensor(i) - 0.5;
    const double ideal = -cfg.learning_rate * (g[i] > 0 ? 1.0 : -1.0);
    // |g| / (|g| + eps) differs from 1 by at most eps / |g|.
    const double allowed = cfg.learning_rate * cfg.epsilon / std::abs(g[i]) + 1e-15;
    adam_excess = std::max(adam_excess, std::abs(step - ideal) - allowed);
  }
  out.require(adam_excess <= 0.0, "first ADAM step off by " + fmt("%.3g", adam_excess));
  out.note("max |sum-1| " + fmt("%.2e", worst_sum) + ", zero-NTN max |y| " +
           fmt("%.1e", ntn_max) + ", |CE-ln2| " + fmt("%.1e", ce_err) +
           ", ADAM first step within lr*eps/|g|");
  return out;
}

// ---------------------------------------------------------------------------
// 3. Overfit oracle

ModelConfig small_config(Variant v, std::size_t dim, std::size_t max_len, std::uint64_t seed) {
  ModelConfig c;
  c.variant = v;
  c.embedding_dim = dim;
  c.gru_dim = 16;
  c.task_dim = 16;
  c.ntn_dim = 8;
  c.max_len = max_len;
  c.seed = seed;
  return c;
}

std::vector<Example> all_examples(const Corpus& c) {
  std::vector<Example> out;
  for (const auto& s : c.samples) out.push_back({s.tokens, s.sentiment, s.sarcasm});
  return out;
}

struct Accuracy {
  double sentiment = 1.0;
  double sarcasm = 1.0;
};

Accuracy accuracy(const Model& m, std::span<const Example> data, const EmbeddingTable& table) {
  std::size_t sen = 0, sar = 0;
  for (const auto& e : data) {
    const auto p = predict(m, e.tokens, table);
    sen += p.sentiment == e.sentiment;
    sar += p.sarcasm == e.sarcasm;
  }
  Accuracy a;
  const double n = static_cast<double>(data.size());
  if (m.has_sentiment()) a.sentiment = sen / n;
  if (m.has_sarcasm()) a.sarcasm = sar / n;
  return a;
}

struct OverfitRun {
  std::size_t epochs = 0;
  Accuracy acc;
};

OverfitRun overfit(Model& m, std::span<const Example> data, const EmbeddingTable& table) {
  TrainConfig tc;
  tc.learning_rate = 0.01;
  tc.epochs = 200;
  tc.seed = 3;
  OverfitRun run;
  train(m, data, table, tc, [&](const EpochRecord& r, const Model& model) {
    run.epochs = r.epoch;
    run.acc = accuracy(model, data, table);
    return std::min(run.acc.sentiment, run.acc.sarcasm) < 0.98;
  });
  return run;
}

Outcome criterion_overfit() {
  Outcome out;
  const auto start = Clock::now();
  const auto set = make_synthetic(SyntheticKind::kSeparable, 50, 16, 3);
  const auto data = all_examples(set.corpus);
  std::string summary;
  for (auto v : kAllVariants) {
    if (v == Variant::kCoerced) continue;
    auto m = Model::build(small_config(v, 16, set.corpus.max_len, 3), set.table);
    const auto run = overfit(m, data, set.table);
    const double acc = std::min(run.acc.sentiment, run.acc.sarcasm);
    out.require(acc >= 0.98, std::string(variant_name(v)) + " reached " +
                                 fmt("%.1f%%", 100 * acc) + " in 200 epochs");
    summary += std::string(variant_name(v)) + " " + fmt("%.0f%%", 100 * acc) + "@" +
               std::to_string(run.epochs) + " ";
  }
  // Coerced: two standalone models, scored against the coerced gold labels.
  auto sen = Model::build(small_config(Variant::kStandaloneSentiment, 16, set.corpus.max_len, 3),
                          set.table);
  auto sar = Model::build(small_config(Variant::kStandaloneSarcasm, 16, set.corpus.max_len, 3),
                          set.table);
  const auto r_sen = overfit(sen, data, set.table);
  const auto r_sar = overfit(sar, data, set.table);
  std::size_t hits = 0;
  for (const auto& e : data) {
    const int pred = coerce(predict(sen, e.tokens, set.table).sentiment,
                            predict(sar, e.tokens, set.table).sarcasm);
    hits += pred == coerce(e.sentiment, e.sarcasm);
  }
  const double coerced_acc = static_cast<double>(hits) / data.size();
  out.require(coerced_acc >= 0.98, "coerced reached " + fmt("%.1f%%", 100 * coerced_acc));
  summary += "coerced " + fmt("%.0f%%", 100 * coerced_acc) + "@" +
             std::to_string(std::max(r_sen.epochs, r_sar.epochs));
  const double secs = seconds_since(start);
  out.require(secs < 120.0, "runtime " + fmt("%.1f s", secs) + " exceeds 120 s");
  out.note(summary + ", " + fmt("%.1f s", secs));
  return out;
}

// ---------------------------------------------------------------------------
// 4. Multi-task ordering

Outcome criterion_ordering() {
  Outcome out;
  const auto start = Clock::now();
  constexpr int kSeeds = 5;
  constexpr std::size_t kFolds = 5;
  constexpr std::size_t kDim = 16;
  double f_fusion = 0, f_standalone = 0, f_coerced = 0, sar_fusion = 0, sar_standalone = 0;
  std::vector<double> diffs_fusion, diffs_coerced;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto set = make_synthetic(SyntheticKind::kSarcasticNegative, 600, kDim, seed);
    const auto& corpus = set.corpus;
    const auto plan = make_folds(corpus, kFolds, seed);
    RunConfig cfg;
    cfg.model = small_config(Variant::kMultiTaskFusion, kDim, corpus.max_len, seed);
    cfg.train.learning_rate = 0.005;
    cfg.train.epochs = 30;
    cfg.train.seed = seed;
    double s_fus = 0, s_sen = 0, s_coe = 0, s_fus_sar = 0, s_sar = 0;
    for (std::size_t f = 0; f < kFolds; ++f) {
      const auto train_idx = plan.training_indices(f, corpus.size());
      const auto train_ex = make_examples(corpus, train_idx);
      const auto test_ex = make_examples(corpus, plan.folds[f]);
      auto fit = [&](Variant v) {
        RunConfig c = cfg;
        c.model.variant = v;
        c.model.seed = cfg.model.seed + f;
        c.train.seed = cfg.train.seed + f;
        return train_model(c, train_ex, set.table);
      };
      const Model fusion = fit(Variant::kMultiTaskFusion);
      const Model sen = fit(Variant::kStandaloneSentiment);
      const Model sar = fit(Variant::kStandaloneSarcasm);
      std::vector<int> gold_sen, gold_sar, p_fus, p_fus_sar, p_sen, p_sar, p_coe;
      for (const auto& e : test_ex) {
        gold_sen.push_back(e.sentiment);
        gold_sar.push_back(e.sarcasm);
        const auto pf = predict(fusion, e.tokens, set.table);
        p_fus.push_back(pf.sentiment);
        p_fus_sar.push_back(pf.sarcasm);
        p_sen.push_back(predict(sen, e.tokens, set.table).sentiment);
        p_sar.push_back(predict(sar, e.tokens, set.table).sarcasm);
        p_coe.push_back(coerce(p_sen.back(), p_sar.back()));
      }
      s_fus += evaluate(p_fus, gold_sen).f_score / kFolds;
      s_sen += evaluate(p_sen, gold_sen).f_score / kFolds;
      s_coe += evaluate(p_coe, gold_sen).f_score / kFolds;
      s_fus_sar += evaluate(p_fus_sar, gold_sar).f_score / kFolds;
      s_sar += evaluate(p_sar, gold_sar).f_score / kFolds;
    }
    f_fusion += s_fus / kSeeds;
    f_standalone += s_sen / kSeeds;
    f_coerced += s_coe / kSeeds;
    sar_fusion += s_fus_sar / kSeeds;
    sar_standalone += s_sar / kSeeds;
    diffs_fusion.push_back(s_fus - s_sen);
    diffs_coerced.push_back(s_coe - s_sen);
  }
  auto cohen_dz = [](const std::vector<double>& d) {
    double mean = 0, var = 0;
    for (double x : d) mean += x / d.size();
    for (double x : d) var += (x - mean) * (x - mean) / (d.size() - 1);
    return var > 0 ? mean / std::sqrt(var) : 0.0;
  };
  out.require(f_fusion >= f_standalone, "fusion sentiment F " + fmt("%.2f", f_fusion) +
                                            " < standalone " + fmt("%.2f", f_standalone));
  out.require(f_coerced >= f_standalone, "coerced sentiment F " + fmt("%.2f", f_coerced) +
                                             " < standalone " + fmt("%.2f", f_standalone));
  const double secs = seconds_since(start);
  out.require(secs < 600.0, "runtime " + fmt("%.1f s", secs) + " exceeds 600 s");
  out.note("sentiment F: fusion " + fmt("%.2f", f_fusion) + ", coerced " + fmt("%.2f", f_coerced) +
           ", standalone " + fmt("%.2f", f_standalone) + "; effect fusion-standalone " +
           fmt("%+.2f", f_fusion - f_standalone) + " (d_z " + fmt("%.2f", cohen_dz(diffs_fusion)) +
           "), coerced-standalone " + fmt("%+.2f", f_coerced - f_standalone) + " (d_z " +
           fmt("%.2f", cohen_dz(diffs_coerced)) + ")");
  auto wins = [](const std::vector<double>& d) {
    return std::to_string(std::count_if(d.begin(), d.end(), [](double x) { return x >= 0; }));
  };
  out.note("seeds with fusion >= standalone: " + wins(diffs_fusion) + "/5, coerced >= standalone: " +
           wins(diffs_coerced) + "/5");
  out.note("sarcasm F (informational): fusion " + fmt("%.2f", sar_fusion) + ", standalone " +
           fmt("%.2f", sar_standalone) + "; " + fmt("%.1f s", secs));
  return out;
}

// ---------------------------------------------------------------------------
// 5. Reference-corpus reproduction, or its replacement

Outcome dummy_baselines() {
  Outcome out;
  const auto corpus = make_label_matched_corpus(994, 383, 350, 5);
  const auto plan = make_folds(corpus, 10, 1);
  FoldRunner always_negative = [](std::size_t, std::span<const std::size_t>,
                                  std::span<const std::size_t> test) {
    FoldPredictions p;
    p.sentiment.assign(test.size(), 0);
    p.sarcasm.assign(test.size(), 0);
    return p;
  };
  const auto report = cross_validate(corpus, plan, always_negative, Averaging::kWeighted);
  // Oracle: with q the negative share of a fold, weighted P = q^2,
  // R = q, F = q * 2q / (1 + q).
  double p = 0, r = 0, f = 0, sar_r = 0;
  for (std::size_t k = 0; k < plan.k(); ++k) {
    std::size_t neg = 0, plain = 0;
    std::vector<int> gold;
    for (auto i : plan.folds[k]) {
      neg += corpus.samples[i].sentiment == 0;
      plain += corpus.samples[i].sarcasm == 0;
      gold.push_back(corpus.samples[i].sentiment);
    }
    const double n = static_cast<double>(plan.folds[k].size());
    const double q = neg / n;
    p += 100 * q * q / plan.k();
    r += 100 * q / plan.k();
    f += 100 * q * 2 * q / (1 + q) / plan.k();
    sar_r += 100 * plain / n / plan.k();
    const auto cm = ConfusionMatrix::from(std::vector<int>(gold.size(), 0), gold);
    out.require(cm.counts[0][0] == cm.support(0) && cm.counts[1][1] == 0,
                "per-class recall is not 100 / 0");
  }
  out.require(std::abs(report.sentiment->precision - p) < 1e-9, "sentiment P");
  out.require(std::abs(report.sentiment->recall - r) < 1e-9, "sentiment R");
  out.require(std::abs(report.sentiment->f_score - f) < 1e-9, "sentiment F");
  out.require(std::abs(report.sarcasm->recall - sar_r) < 1e-9, "sarcasm R");
  out.note("always-negative baseline: P " + fmt("%.2f", report.sentiment->precision) + " R " +
           fmt("%.2f", report.sentiment->recall) + " F " + fmt("%.2f", report.sentiment->f_score) +
           " (negative-class recall 100, positive 0) matches the analytic values");
  return out;
}

Outcome reproduction(const char* corpus_path, const char* glove_path) {
  Outcome out;
  const auto start = Clock::now();
  const Corpus corpus = load_corpus(corpus_path);
  RunConfig base;
  base.model.max_len = corpus.max_len;
  const auto table =
      load_glove(glove_path, corpus.vocabulary(), base.model.embedding_dim).table;
  const std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  auto run = [&](Variant v) {
    RunConfig c = base;
    c.model.variant = v;
    return cross_validate(corpus, table, c, jobs);
  };
  const auto shared = run(Variant::kMultiTaskFusionSharedAttention);
  const auto sen = run(Variant::kStandaloneSentiment);
  const auto sar = run(Variant::kStandaloneSarcasm);
  auto within = [&](double got, double want, const std::string& what) {
    out.require(std::abs(got - want) <= 3.0,
                what + " " + fmt("%.2f", got) + " not within 3.0 of " + fmt("%.2f", want));
  };
  within(shared.sentiment->f_score, 83.03, "shared-attention sentiment F");
  within(shared.sarcasm->f_score, 90.29, "shared-attention sarcasm F");
  within(*shared.average_f, 86.66, "shared-attention average F");
  within(sen.sentiment->f_score, 78.13, "standalone sentiment F");
  within(sar.sarcasm->f_score, 89.37, "standalone sarcasm F");
  out.note("shared-attention " + fmt("%.2f", shared.sentiment->f_score) + " / " +
           fmt("%.2f", shared.sarcasm->f_score) + " avg " + fmt("%.2f", *shared.average_f) +
           ", standalone " + fmt("%.2f", sen.sentiment->f_score) + " / " +
           fmt("%.2f", sar.sarcasm->f_score) + ", " + fmt("%.0f s", seconds_since(start)));
  return out;
}

// ---------------------------------------------------------------------------
// 6. Determinism and persistence

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

Outcome criterion_determinism() {
  Outcome out;
  const auto set = make_synthetic(SyntheticKind::kSarcasticNegative, 80, 8, 6);
  const auto data = all_examples(set.corpus);
  const std::vector<double> table_before(set.table.matrix().values().begin(),
                                         set.table.matrix().values().end());
  TrainConfig tc;
  tc.epochs = 3;
  tc.learning_rate = 0.01;
  tc.seed = 6;
  for (auto v : kAllVariants) {
    if (v == Variant::kCoerced) continue;
    const auto cfg = small_config(v, 8, set.corpus.max_len, 6);
    auto a = Model::build(cfg, set.table);
    auto b = Model::build(cfg, set.table);
    train(a, data, set.table, tc);
    train(b, data, set.table, tc);
    const auto pa = a.parameters(), pb = b.parameters();
    bool same = pa.size() == pb.size();
    for (std::size_t i = 0; same && i < pa.size(); ++i) {
      same = bitwise_equal(pa[i].tensor.values(), pb[i].tensor.values());
    }
    out.require(same, std::string(variant_name(v)) + " parameters differ between equal-seed runs");

    const auto restored = deserialize_checkpoint(serialize_checkpoint(a, set.table, {}));
    bool preds_same = true;
    for (const auto& e : data) {
      const auto x = a.forward(e.tokens, set.table), y = restored.model.forward(e.tokens, set.table);
      if (x.sentiment)
        preds_same &= bitwise_equal(x.sentiment->probs.values(), y.sentiment->probs.values());
      if (x.sarcasm)
        preds_same &= bitwise_equal(x.sarcasm->probs.values(), y.sarcasm->probs.values());
    }
    out.require(preds_same, std::string(variant_name(v)) + " checkpoint round trip changed outputs");
  }
  out.require(bitwise_equal(table_before, set.table.matrix().values()),
              "embedding rows changed during training");
  out.note("6 variants: equal-seed parameters, checkpoint outputs and embedding rows bitwise equal");
  return out;
}

// ---------------------------------------------------------------------------
// 7. Coercion truth table

Outcome criterion_coercion() {
  Outcome out;
  const int table[4][3] = {{0, 0, 0}, {0, 1, 0}, {1, 0, 1}, {1, 1, 0}};
  for (const auto& row : table) {
    out.require(coerce(row[0], row[1]) == row[2],
                "coerce(" + std::to_string(row[0]) + ", " + std::to_string(row[1]) + ")");
  }
  out.note("(neg,no)->neg (neg,yes)->neg (pos,no)->pos (pos,yes)->neg");
  return out;
}

bool report(int number, const char* title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.notes.push_back(std::string("exception: ") + e.what());
  }
  std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", number, title);
  for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main() {
  bool ok = true;
  bool base_ok = true;
  base_ok &= report(1, "gradient correctness", criterion_gradients);
  base_ok &= report(2, "analytic fixed points", criterion_fixed_points);
  base_ok &= report(3, "overfit oracle", criterion_overfit);
  base_ok &= report(4, "multi-task ordering", criterion_ordering);
  ok &= base_ok;
  const char* corpus = std::getenv("MTSA_REFERENCE_CORPUS");
  const char* glove = std::getenv("MTSA_GLOVE");
  if (corpus != nullptr && glove != nullptr) {
    ok &= report(5, "reference corpus reproduction", [&] { return reproduction(corpus, glove); });
  } else {
    ok &= report(5, "reference corpus reproduction (replaced: dataset not available)", [&] {
      Outcome o = dummy_baselines();
      o.require(base_ok, "criteria 1-4");
      o.note("set MTSA_REFERENCE_CORPUS and MTSA_GLOVE to run the full reproduction");
      return o;
    });
  }
  ok &= report(6, "determinism and persistence", criterion_determinism);
  ok &= report(7, "coercion truth table", criterion_coercion);
  return ok ? 0 : 1;
}
