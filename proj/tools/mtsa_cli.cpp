// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors
//
// mtsa-cli: prepare, synth, train, crossval, predict, attention.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mtsa/mtsa.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kData = 2,
  kConfig = 3,
  kNumeric = 4,
  kInput = 5,
  kIo = 6,
  kUsage = 64,
};

int exit_code(mtsa_status s) {
  switch (s) {
    case MTSA_OK: return kOk;
    case MTSA_ERR_SCHEMA:
    case MTSA_ERR_VALUE:
    case MTSA_ERR_PARSE:
    case MTSA_ERR_DIMENSION: return kData;
    case MTSA_ERR_CONFIG: return kConfig;
    case MTSA_ERR_NUMERIC: return kNumeric;
    case MTSA_ERR_INPUT:
    case MTSA_ERR_CONTRACT:
    case MTSA_ERR_VOCAB_MISMATCH: return kInput;
    case MTSA_ERR_IO: return kIo;
    default: return kInternal;
  }
}

struct Failure {
  int code;
};

void check(mtsa_status s) {
  if (s == MTSA_OK) return;
  std::cerr << "mtsa: " << mtsa_status_name(s) << ": " << mtsa_last_error() << "\n";
  throw Failure{exit_code(s)};
}

[[noreturn]] void die(int code, const std::string& message) {
  std::cerr << "mtsa: " << message << "\n";
  throw Failure{code};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using CorpusPtr = std::unique_ptr<mtsa_corpus, Deleter<mtsa_corpus, mtsa_corpus_free>>;
using EmbeddingsPtr =
    std::unique_ptr<mtsa_embeddings, Deleter<mtsa_embeddings, mtsa_embeddings_free>>;
using ModelPtr = std::unique_ptr<mtsa_model, Deleter<mtsa_model, mtsa_model_free>>;
using ReportPtr = std::unique_ptr<mtsa_report, Deleter<mtsa_report, mtsa_report_free>>;
using AttentionPtr =
    std::unique_ptr<mtsa_attention, Deleter<mtsa_attention, mtsa_attention_free>>;

std::string take(char* s) {
  std::string out(s);
  mtsa_string_free(s);
  return out;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string digest(const std::string& path) {
  char* hex = nullptr;
  check(mtsa_file_digest(path.c_str(), &hex));
  return take(hex);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) die(kIo, "cannot write " + path.string());
}

void print_summary(const mtsa_corpus* corpus) {
  mtsa_corpus_summary s{};
  check(mtsa_corpus_summary_get(corpus, &s));
  const double n = s.samples == 0 ? 1.0 : static_cast<double>(s.samples);
  std::printf("samples     %zu\n", s.samples);
  std::printf("positive    %zu (%.1f%%)\n", s.positives, 100.0 * s.positives / n);
  std::printf("negative    %zu (%.1f%%)\n", s.samples - s.positives,
              100.0 * (s.samples - s.positives) / n);
  std::printf("sarcastic   %zu (%.1f%%)\n", s.sarcastic, 100.0 * s.sarcastic / n);
  std::printf("max tokens  %zu\n", s.max_len);
  std::printf("vocabulary  %zu\n", s.vocabulary);
}

// Hyperparameter flags shared by train and crossval. Unset flags leave the
// config file (or the built-in default) in charge.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::string> variant;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr;
  std::optional<std::string> averaging;
  std::optional<std::size_t> folds;
  std::optional<std::uint64_t> fold_seed;
  std::optional<std::size_t> embedding_dim;
  std::optional<std::size_t> gru_dim;
  std::optional<std::size_t> task_dim;
  std::optional<std::size_t> ntn_dim;
  bool separate_gru = false;

  void attach(CLI::App* app, bool evaluation) {
    app->add_option("--config", config_path, "JSON config file");
    app->add_option("--variant", variant,
                    "standalone-sentiment | standalone-sarcasm | coerced | multitask-simple | "
                    "multitask-fusion | multitask-fusion-separate-gru | shared-attention");
    app->add_option("--seed", seed, "Seed for initialisation and shuffling");
    app->add_option("--epochs", epochs);
    app->add_option("--batch-size", batch_size);
    app->add_option("--lr", lr, "ADAM learning rate");
    app->add_option("--embedding-dim", embedding_dim, "Word vector dimension of the GloVe file");
    app->add_option("--gru-dim", gru_dim);
    app->add_option("--task-dim", task_dim);
    app->add_option("--ntn-dim", ntn_dim);
    app->add_flag("--separate-gru", separate_gru,
                  "One GRU per task (shared-attention variant only)");
    if (evaluation) {
      app->add_option("--averaging", averaging, "weighted | macro");
      app->add_option("--folds", folds);
      app->add_option("--fold-seed", fold_seed);
    }
  }

  json resolve() const {
    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) die(kIo, "cannot read " + config_path);
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        die(kConfig, config_path + ": " + e.what());
      }
      if (!j.is_object()) die(kConfig, config_path + ": expected a JSON object");
    }
    auto set = [&](const char* section, const char* key, const auto& v) {
      if (v) j[section][key] = *v;
    };
    set("model", "variant", variant);
    set("model", "seed", seed);
    set("train", "seed", seed);
    set("train", "epochs", epochs);
    set("train", "batch_size", batch_size);
    set("train", "learning_rate", lr);
    set("model", "embedding_dim", embedding_dim);
    set("model", "gru_dim", gru_dim);
    set("model", "task_dim", task_dim);
    set("model", "ntn_dim", ntn_dim);
    if (separate_gru) j["model"]["separate_gru"] = true;
    set("evaluation", "averaging", averaging);
    set("evaluation", "folds", folds);
    set("evaluation", "fold_seed", fold_seed);
    char* out = nullptr;
    check(mtsa_config_resolve(j.dump().c_str(), &out));
    return json::parse(take(out));
  }
};

json manifest_for(const std::string& command, const json& config, const std::string& corpus,
                  const std::string& glove, const std::string& started) {
  return {{"tool", "mtsa"},
          {"version", mtsa_version()},
          {"command", command},
          {"config", config},
          {"corpus", {{"path", corpus}, {"fnv1a64", digest(corpus)}}},
          {"embeddings", {{"path", glove}, {"fnv1a64", digest(glove)}}},
          {"started_at", started}};
}

struct Loaded {
  CorpusPtr corpus;
  EmbeddingsPtr embeddings;
};

Loaded load_inputs(const std::string& corpus_path, const std::string& glove_path,
                   std::size_t dim) {
  Loaded in;
  mtsa_corpus* c = nullptr;
  check(mtsa_corpus_load(corpus_path.c_str(), &c));
  in.corpus.reset(c);
  mtsa_embeddings* e = nullptr;
  double coverage = 0.0;
  check(mtsa_embeddings_load(glove_path.c_str(), c, dim, &e, &coverage));
  in.embeddings.reset(e);
  std::fprintf(stderr, "embedding coverage %.2f%% of the corpus vocabulary\n", 100.0 * coverage);
  return in;
}

ModelPtr load_model(const std::string& path) {
  mtsa_model* m = nullptr;
  check(mtsa_model_load(path.c_str(), &m));
  return ModelPtr(m);
}

EmbeddingsPtr load_for_model(const std::string& glove, const mtsa_model* model) {
  mtsa_embeddings* e = nullptr;
  check(mtsa_embeddings_load_for_model(glove.c_str(), model, &e, nullptr));
  return EmbeddingsPtr(e);
}

const char* sentiment_name(int label) { return label == 1 ? "positive" : "negative"; }
const char* sarcasm_name(int label) { return label == 1 ? "sarcastic" : "not sarcastic"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint sentiment and sarcasm classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mtsa_version()));

  // prepare
  std::string prep_in, prep_out;
  auto* prepare = app.add_subcommand("prepare", "Normalise a corpus into the canonical CSV");
  prepare->add_option("input", prep_in, "Source corpus (canonical or upstream layout)")
      ->required();
  prepare->add_option("output", prep_out, "Canonical CSV to write")->required();

  // synth
  std::string syn_kind = "sarcastic-negative", syn_corpus, syn_glove;
  std::size_t syn_samples = 600, syn_dim = 50;
  std::uint64_t syn_seed = 1;
  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus and matching embeddings");
  synth->add_option("--kind", syn_kind, "separable | sarcastic-negative")->capture_default_str();
  synth->add_option("--samples", syn_samples)->capture_default_str();
  synth->add_option("--dim", syn_dim)->capture_default_str();
  synth->add_option("--seed", syn_seed)->capture_default_str();
  synth->add_option("--corpus", syn_corpus, "Output corpus CSV")->required();
  synth->add_option("--glove", syn_glove, "Output embedding file")->required();

  // train
  std::string tr_corpus, tr_glove, tr_out, tr_trace;
  ConfigFlags tr_flags;
  auto* train = app.add_subcommand("train", "Train one model on a whole corpus");
  train->add_option("--corpus", tr_corpus)->required();
  train->add_option("--glove", tr_glove)->required();
  train->add_option("--out", tr_out, "Checkpoint to write")->required();
  train->add_option("--trace", tr_trace, "Per-epoch loss trace (JSON lines)");
  tr_flags.attach(train, false);

  // crossval
  std::string cv_corpus, cv_glove, cv_out;
  std::size_t cv_jobs = 1;
  bool cv_no_ckpt = false;
  ConfigFlags cv_flags;
  auto* crossval = app.add_subcommand("crossval", "k-fold cross-validation of one variant");
  crossval->add_option("--corpus", cv_corpus)->required();
  crossval->add_option("--glove", cv_glove)->required();
  crossval->add_option("--out-dir", cv_out, "Directory for report, manifest and checkpoints")
      ->required();
  crossval->add_option("--jobs", cv_jobs, "Folds trained concurrently")->capture_default_str();
  crossval->add_flag("--no-checkpoints", cv_no_ckpt, "Skip writing per-fold checkpoints");
  cv_flags.attach(crossval, true);

  // predict
  std::string pr_ckpt, pr_sarcasm_ckpt, pr_glove, pr_sentence;
  bool pr_json = false;
  auto* predict = app.add_subcommand("predict", "Classify one sentence");
  predict->add_option("--checkpoint", pr_ckpt)->required();
  predict->add_option("--coerce-with", pr_sarcasm_ckpt,
                      "Standalone sarcasm checkpoint; --checkpoint must then be a standalone "
                      "sentiment model and its sentiment is coerced");
  predict->add_option("--glove", pr_glove, "Embedding file the model was trained with")
      ->required();
  predict->add_option("sentence", pr_sentence)->required();
  predict->add_flag("--json", pr_json, "Print JSON instead of text");

  // attention
  std::string at_ckpt, at_glove, at_sentence;
  auto* attention = app.add_subcommand("attention", "Per-token attention weights");
  attention->add_option("--checkpoint", at_ckpt)->required();
  attention->add_option("--glove", at_glove)->required();
  attention->add_option("sentence", at_sentence)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*prepare) {
      mtsa_corpus* c = nullptr;
      check(mtsa_corpus_prepare(prep_in.c_str(), prep_out.c_str(), &c));
      CorpusPtr corpus(c);
      print_summary(corpus.get());
      std::printf("wrote %s\n", prep_out.c_str());
    } else if (*synth) {
      check(mtsa_synthesize(syn_kind.c_str(), syn_samples, syn_dim, syn_seed, syn_corpus.c_str(),
                            syn_glove.c_str()));
      std::printf("wrote %s and %s\n", syn_corpus.c_str(), syn_glove.c_str());
    } else if (*train) {
      const std::string started = utc_now();
      const json config = tr_flags.resolve();
      auto in = load_inputs(tr_corpus, tr_glove, config["model"]["embedding_dim"].get<size_t>());
      json manifest = manifest_for("train", config, tr_corpus, tr_glove, started);
      mtsa_model* m = nullptr;
      check(mtsa_train(in.corpus.get(), in.embeddings.get(), config.dump().c_str(),
                       manifest.dump().c_str(), tr_trace.empty() ? nullptr : tr_trace.c_str(),
                       &m));
      ModelPtr model(m);
      check(mtsa_model_save(model.get(), tr_out.c_str()));
      manifest["finished_at"] = utc_now();
      manifest["checkpoint"] = tr_out;
      write_text(tr_out + ".manifest.json", manifest.dump(2) + "\n");
      std::printf("wrote %s\n", tr_out.c_str());
    } else if (*crossval) {
      const std::string started = utc_now();
      const json config = cv_flags.resolve();
      auto in = load_inputs(cv_corpus, cv_glove, config["model"]["embedding_dim"].get<size_t>());
      json manifest = manifest_for("crossval", config, cv_corpus, cv_glove, started);
      const fs::path out_dir(cv_out);
      const std::string ckpt_dir = (out_dir / "checkpoints").string();
      mtsa_report* r = nullptr;
      check(mtsa_crossval(in.corpus.get(), in.embeddings.get(), config.dump().c_str(), cv_jobs,
                          cv_no_ckpt ? nullptr : ckpt_dir.c_str(), manifest.dump().c_str(), &r));
      ReportPtr report(r);
      char* text = nullptr;
      check(mtsa_report_json(report.get(), &text));
      json report_json = json::parse(take(text));
      report_json["config"] = config;
      report_json["corpus_fnv1a64"] = manifest["corpus"]["fnv1a64"];
      report_json["embeddings_fnv1a64"] = manifest["embeddings"]["fnv1a64"];
      report_json["manifest"] = "manifest.json";
      check(mtsa_report_table(report.get(), &text));
      const std::string table = take(text);
      manifest["finished_at"] = utc_now();
      manifest["report"] = "report.json";
      write_text(out_dir / "report.json", report_json.dump(2) + "\n");
      write_text(out_dir / "report.txt", table);
      write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
      std::fputs(table.c_str(), stdout);
    } else if (*predict) {
      ModelPtr model = load_model(pr_ckpt);
      EmbeddingsPtr emb = load_for_model(pr_glove, model.get());
      mtsa_prediction p{};
      if (pr_sarcasm_ckpt.empty()) {
        check(mtsa_model_predict(model.get(), emb.get(), pr_sentence.c_str(), &p));
      } else {
        ModelPtr sar = load_model(pr_sarcasm_ckpt);
        EmbeddingsPtr sar_emb = load_for_model(pr_glove, sar.get());
        check(mtsa_predict_coerced(model.get(), emb.get(), sar.get(), sar_emb.get(),
                                   pr_sentence.c_str(), &p));
      }
      if (pr_json) {
        json j = json::object();
        if (p.has_sentiment) {
          j["sentiment"] = {{"label", sentiment_name(p.sentiment)},
                            {"probabilities",
                             {{"negative", p.sentiment_probs[0]},
                              {"positive", p.sentiment_probs[1]}}}};
        }
        if (p.has_sarcasm) {
          j["sarcasm"] = {{"label", sarcasm_name(p.sarcasm)},
                          {"probabilities",
                           {{"no", p.sarcasm_probs[0]}, {"yes", p.sarcasm_probs[1]}}}};
        }
        if (!pr_sarcasm_ckpt.empty()) j["coerced"] = true;
        std::printf("%s\n", j.dump(2).c_str());
      } else {
        if (p.has_sentiment) {
          std::printf("sentiment  %-13s  p(negative)=%.4f  p(positive)=%.4f%s\n",
                      sentiment_name(p.sentiment), p.sentiment_probs[0], p.sentiment_probs[1],
                      pr_sarcasm_ckpt.empty() ? "" : "  (coerced)");
        }
        if (p.has_sarcasm) {
          std::printf("sarcasm    %-13s  p(no)=%.4f  p(yes)=%.4f\n", sarcasm_name(p.sarcasm),
                      p.sarcasm_probs[0], p.sarcasm_probs[1]);
        }
      }
    } else if (*attention) {
      ModelPtr model = load_model(at_ckpt);
      EmbeddingsPtr emb = load_for_model(at_glove, model.get());
      mtsa_attention* a = nullptr;
      check(mtsa_model_attention(model.get(), emb.get(), at_sentence.c_str(), &a));
      AttentionPtr att(a);
      std::size_t width = 5;
      for (std::size_t i = 0; i < mtsa_attention_size(a); ++i) {
        width = std::max(width, std::string(mtsa_attention_token(a, i)).size());
      }
      std::printf("%-*s  %9s  %9s\n", static_cast<int>(width), "token", "alpha_sen", "alpha_sar");
      for (std::size_t i = 0; i < mtsa_attention_size(a); ++i) {
        double sen = 0.0, sar = 0.0;
        check(mtsa_attention_weights(a, i, &sen, &sar));
        std::printf("%-*s  %9.6f  %9.6f\n", static_cast<int>(width), mtsa_attention_token(a, i),
                    sen, sar);
      }
    }
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "mtsa: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
