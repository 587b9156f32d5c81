// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#include "mtsa/mtsa.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mtsa/checkpoint.hpp"
#include "mtsa/config.hpp"
#include "mtsa/data.hpp"
#include "mtsa/error.hpp"
#include "mtsa/eval.hpp"
#include "mtsa/synthetic.hpp"
#include "mtsa/training.hpp"

#ifndef MTSA_VERSION_STRING
#define MTSA_VERSION_STRING "0.0.0"
#endif

struct mtsa_corpus {
  mtsa::Corpus corpus;
};

struct mtsa_embeddings {
  mtsa::EmbeddingTable table;
};

struct mtsa_model {
  mtsa::Checkpoint checkpoint;
};

struct mtsa_report {
  mtsa::EvalReport report;
};

struct mtsa_attention {
  std::vector<std::string> tokens;
  std::vector<double> sentiment;
  std::vector<double> sarcasm;
};

namespace {

using json = nlohmann::json;

thread_local std::string g_last_error;

struct NullArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

mtsa_status status_of(mtsa::ErrorKind kind) {
  switch (kind) {
    case mtsa::ErrorKind::kInput: return MTSA_ERR_INPUT;
    case mtsa::ErrorKind::kSchema: return MTSA_ERR_SCHEMA;
    case mtsa::ErrorKind::kValue: return MTSA_ERR_VALUE;
    case mtsa::ErrorKind::kParse: return MTSA_ERR_PARSE;
    case mtsa::ErrorKind::kDimension: return MTSA_ERR_DIMENSION;
    case mtsa::ErrorKind::kConfig: return MTSA_ERR_CONFIG;
    case mtsa::ErrorKind::kNumeric: return MTSA_ERR_NUMERIC;
    case mtsa::ErrorKind::kContract: return MTSA_ERR_CONTRACT;
    case mtsa::ErrorKind::kIo: return MTSA_ERR_IO;
    case mtsa::ErrorKind::kVocabMismatch: return MTSA_ERR_VOCAB_MISMATCH;
  }
  return MTSA_ERR_INTERNAL;
}

template <typename F>
mtsa_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return MTSA_OK;
  } catch (const mtsa::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const NullArgument& e) {
    g_last_error = e.what();
    return MTSA_ERR_NULL_ARGUMENT;
  } catch (const json::exception& e) {
    g_last_error = std::string("configuration: ") + e.what();
    return MTSA_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MTSA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MTSA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return MTSA_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw NullArgument(std::string(name) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_optional(const char* text, const char* what) {
  if (text == nullptr || *text == '\0') return json::object();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    mtsa::fail(mtsa::ErrorKind::kConfig, std::string(what) + " is not valid JSON: " + e.what());
  }
}

mtsa::RunConfig resolve(const char* config_json) {
  mtsa::RunConfig cfg = mtsa::run_config_from_json(parse_optional(config_json, "config"));
  cfg.validate();
  return cfg;
}

void fill(mtsa_prediction* out, const mtsa::ModelOutput& o) {
  *out = mtsa_prediction{};
  if (o.sentiment) {
    out->has_sentiment = 1;
    out->sentiment = o.sentiment->label;
    out->sentiment_probs[0] = o.sentiment->probs.values()[0];
    out->sentiment_probs[1] = o.sentiment->probs.values()[1];
  }
  if (o.sarcasm) {
    out->has_sarcasm = 1;
    out->sarcasm = o.sarcasm->label;
    out->sarcasm_probs[0] = o.sarcasm->probs.values()[0];
    out->sarcasm_probs[1] = o.sarcasm->probs.values()[1];
  }
}

mtsa::ModelOutput run_model(const mtsa_model* model, const mtsa_embeddings* embeddings,
                            const char* sentence) {
  require(model, "model");
  require(embeddings, "embeddings");
  require(sentence, "sentence");
  mtsa::verify_embeddings(model->checkpoint, embeddings->table);
  return model->checkpoint.model.forward(mtsa::tokenize(sentence), embeddings->table);
}

}  // namespace

extern "C" {

const char* mtsa_version(void) { return MTSA_VERSION_STRING; }

const char* mtsa_last_error(void) { return g_last_error.c_str(); }

const char* mtsa_status_name(mtsa_status status) {
  switch (status) {
    case MTSA_OK: return "ok";
    case MTSA_ERR_INPUT: return "input error";
    case MTSA_ERR_SCHEMA: return "schema error";
    case MTSA_ERR_VALUE: return "value error";
    case MTSA_ERR_PARSE: return "parse error";
    case MTSA_ERR_DIMENSION: return "dimension error";
    case MTSA_ERR_CONFIG: return "config error";
    case MTSA_ERR_NUMERIC: return "numeric error";
    case MTSA_ERR_CONTRACT: return "contract error";
    case MTSA_ERR_IO: return "io error";
    case MTSA_ERR_VOCAB_MISMATCH: return "vocabulary mismatch";
    case MTSA_ERR_NULL_ARGUMENT: return "null argument";
    case MTSA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void mtsa_string_free(char* s) { std::free(s); }

mtsa_status mtsa_file_digest(const char* path, char** out_hex) {
  if (path == nullptr || out_hex == nullptr) {
    g_last_error = "path and out_hex must not be NULL";
    return MTSA_ERR_NULL_ARGUMENT;
  }
  return guarded([&] { *out_hex = dup_string(mtsa::file_digest(path)); });
}

mtsa_status mtsa_config_resolve(const char* config_json, char** out_json) {
  if (out_json == nullptr) {
    g_last_error = "out_json must not be NULL";
    return MTSA_ERR_NULL_ARGUMENT;
  }
  return guarded([&] { *out_json = dup_string(mtsa::to_json(resolve(config_json)).dump(2)); });
}

int mtsa_coerce(int sentiment_label, int sarcasm_label) {
  return mtsa::coerce(sentiment_label, sarcasm_label);
}

#define MTSA_REQUIRE(cond, message)  \
  do {                               \
    if (!(cond)) {                   \
      g_last_error = message;        \
      return MTSA_ERR_NULL_ARGUMENT; \
    }                                \
  } while (0)

mtsa_status mtsa_corpus_load(const char* path, mtsa_corpus** out) {
  MTSA_REQUIRE(path && out, "path and out must not be NULL");
  return guarded([&] { *out = new mtsa_corpus{mtsa::load_corpus(path)}; });
}

mtsa_status mtsa_corpus_prepare(const char* input_path, const char* output_path,
                                mtsa_corpus** out) {
  MTSA_REQUIRE(input_path && output_path, "input_path and output_path must not be NULL");
  return guarded([&] {
    mtsa::Corpus corpus = mtsa::convert_corpus(mtsa::read_file(input_path), input_path);
    mtsa::write_corpus(corpus, output_path);
    if (out != nullptr) *out = new mtsa_corpus{std::move(corpus)};
  });
}

mtsa_status mtsa_corpus_summary_get(const mtsa_corpus* corpus, mtsa_corpus_summary* out) {
  MTSA_REQUIRE(corpus && out, "corpus and out must not be NULL");
  return guarded([&] {
    const auto& c = corpus->corpus;
    *out = {c.size(), c.positives, c.sarcastic, c.max_len, c.vocabulary().size()};
  });
}

void mtsa_corpus_free(mtsa_corpus* corpus) { delete corpus; }

mtsa_status mtsa_embeddings_load(const char* glove_path, const mtsa_corpus* corpus, size_t dim,
                                 mtsa_embeddings** out, double* coverage) {
  MTSA_REQUIRE(glove_path && corpus && out, "glove_path, corpus and out must not be NULL");
  return guarded([&] {
    auto loaded = mtsa::load_glove(glove_path, corpus->corpus.vocabulary(), dim);
    if (coverage != nullptr) *coverage = loaded.coverage();
    *out = new mtsa_embeddings{std::move(loaded.table)};
  });
}

mtsa_status mtsa_embeddings_load_for_model(const char* glove_path, const mtsa_model* model,
                                           mtsa_embeddings** out, double* coverage) {
  MTSA_REQUIRE(glove_path && model && out, "glove_path, model and out must not be NULL");
  return guarded([&] {
    const auto& ck = model->checkpoint;
    const std::set<std::string> vocab(ck.vocabulary.begin(), ck.vocabulary.end());
    auto loaded = mtsa::load_glove(glove_path, vocab, ck.model.config().embedding_dim);
    if (coverage != nullptr) *coverage = loaded.coverage();
    *out = new mtsa_embeddings{std::move(loaded.table)};
  });
}

void mtsa_embeddings_free(mtsa_embeddings* embeddings) { delete embeddings; }

mtsa_status mtsa_train(const mtsa_corpus* corpus, const mtsa_embeddings* embeddings,
                       const char* config_json, const char* manifest_json, const char* trace_path,
                       mtsa_model** out) {
  MTSA_REQUIRE(corpus && embeddings && out, "corpus, embeddings and out must not be NULL");
  return guarded([&] {
    mtsa::RunConfig cfg = resolve(config_json);
    const json manifest = parse_optional(manifest_json, "manifest");
    const auto& c = corpus->corpus;
    if (cfg.model.max_len == 0) cfg.model.max_len = c.max_len;
    if (cfg.model.max_len < c.max_len) {
      mtsa::fail(mtsa::ErrorKind::kConfig,
                 "max_len " + std::to_string(cfg.model.max_len) +
                     " is shorter than the longest sentence (" + std::to_string(c.max_len) +
                     " tokens)");
    }
    std::ofstream trace;
    if (trace_path != nullptr) {
      trace.open(trace_path);
      if (!trace) mtsa::fail(mtsa::ErrorKind::kIo, std::string("cannot write ") + trace_path);
    }
    std::vector<std::size_t> all(c.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto examples = mtsa::make_examples(c, all);
    mtsa::Model model = mtsa::train_model(
        cfg, examples, embeddings->table, [&](const mtsa::EpochRecord& r, const mtsa::Model&) {
          if (trace.is_open()) {
            trace << json{{"epoch", r.epoch},
                          {"J_sen", r.sentiment},
                          {"J_sar", r.sarcasm},
                          {"joint", r.joint}}
                         .dump()
                  << '\n';
          }
          return true;
        });
    const auto& table = embeddings->table;
    *out = new mtsa_model{
        mtsa::Checkpoint{std::move(model), table.tokens(), table.fingerprint(), manifest}};
  });
}

mtsa_status mtsa_crossval(const mtsa_corpus* corpus, const mtsa_embeddings* embeddings,
                          const char* config_json, size_t jobs, const char* checkpoint_dir,
                          const char* manifest_json, mtsa_report** out) {
  MTSA_REQUIRE(corpus && embeddings && out, "corpus, embeddings and out must not be NULL");
  return guarded([&] {
    const mtsa::RunConfig cfg = resolve(config_json);
    const json manifest = parse_optional(manifest_json, "manifest");
    mtsa::FoldModelSink sink;
    if (checkpoint_dir != nullptr) {
      const std::filesystem::path dir(checkpoint_dir);
      const auto variant = std::string(mtsa::variant_name(cfg.model.variant));
      sink = [&, dir, variant](std::size_t fold, const std::string& role, const mtsa::Model& m) {
        std::string name = "fold-" + std::to_string(fold);
        if (role != variant) name += "-" + role;
        json fold_manifest = manifest;
        fold_manifest["fold"] = fold;
        fold_manifest["role"] = role;
        mtsa::save_checkpoint(dir / (name + ".ckpt"), m, embeddings->table, fold_manifest);
      };
    }
    *out = new mtsa_report{
        mtsa::cross_validate(corpus->corpus, embeddings->table, cfg, jobs == 0 ? 1 : jobs, sink)};
  });
}

mtsa_status mtsa_report_json(const mtsa_report* report, char** out_json) {
  MTSA_REQUIRE(report && out_json, "report and out_json must not be NULL");
  return guarded([&] { *out_json = dup_string(report->report.to_json().dump(2)); });
}

mtsa_status mtsa_report_table(const mtsa_report* report, char** out_text) {
  MTSA_REQUIRE(report && out_text, "report and out_text must not be NULL");
  return guarded([&] { *out_text = dup_string(report->report.to_table()); });
}

mtsa_status mtsa_report_task(const mtsa_report* report, mtsa_task task, mtsa_task_metrics* out,
                             int* present) {
  MTSA_REQUIRE(report && out && present, "report, out and present must not be NULL");
  return guarded([&] {
    const auto& m = task == MTSA_TASK_SARCASM ? report->report.sarcasm : report->report.sentiment;
    *present = m.has_value() ? 1 : 0;
    *out = m ? mtsa_task_metrics{m->precision, m->recall, m->f_score} : mtsa_task_metrics{};
  });
}

mtsa_status mtsa_report_average_f(const mtsa_report* report, double* out, int* present) {
  MTSA_REQUIRE(report && out && present, "report, out and present must not be NULL");
  const auto& avg = report->report.average_f;
  *present = avg.has_value() ? 1 : 0;
  *out = avg.value_or(0.0);
  return MTSA_OK;
}

void mtsa_report_free(mtsa_report* report) { delete report; }

mtsa_status mtsa_model_save(const mtsa_model* model, const char* path) {
  MTSA_REQUIRE(model && path, "model and path must not be NULL");
  return guarded([&] { mtsa::save_checkpoint(path, model->checkpoint); });
}

mtsa_status mtsa_model_load(const char* path, mtsa_model** out) {
  MTSA_REQUIRE(path && out, "path and out must not be NULL");
  return guarded([&] { *out = new mtsa_model{mtsa::load_checkpoint(path)}; });
}

mtsa_status mtsa_model_info(const mtsa_model* model, char** out_json) {
  MTSA_REQUIRE(model && out_json, "model and out_json must not be NULL");
  return guarded([&] {
    const auto& ck = model->checkpoint;
    const json info = {{"config", mtsa::model_config_to_json(ck.model.config())},
                       {"manifest", ck.manifest},
                       {"parameters", ck.model.parameter_count()},
                       {"vocabulary_size", ck.vocabulary.size()},
                       {"embedding_fingerprint", mtsa::hex64(ck.embedding_fingerprint)}};
    *out_json = dup_string(info.dump(2));
  });
}

void mtsa_model_free(mtsa_model* model) { delete model; }

mtsa_status mtsa_model_predict(const mtsa_model* model, const mtsa_embeddings* embeddings,
                               const char* sentence, mtsa_prediction* out) {
  MTSA_REQUIRE(out, "out must not be NULL");
  return guarded([&] { fill(out, run_model(model, embeddings, sentence)); });
}

mtsa_status mtsa_predict_coerced(const mtsa_model* sentiment_model,
                                 const mtsa_embeddings* sentiment_embeddings,
                                 const mtsa_model* sarcasm_model,
                                 const mtsa_embeddings* sarcasm_embeddings, const char* sentence,
                                 mtsa_prediction* out) {
  MTSA_REQUIRE(out, "out must not be NULL");
  return guarded([&] {
    require(sentiment_model, "sentiment_model");
    require(sarcasm_model, "sarcasm_model");
    if (sentiment_model->checkpoint.model.variant() != mtsa::Variant::kStandaloneSentiment) {
      mtsa::fail(mtsa::ErrorKind::kContract,
                 "coerced prediction needs a standalone-sentiment model first");
    }
    if (sarcasm_model->checkpoint.model.variant() != mtsa::Variant::kStandaloneSarcasm) {
      mtsa::fail(mtsa::ErrorKind::kContract,
                 "coerced prediction needs a standalone-sarcasm model second");
    }
    mtsa::ModelOutput sen = run_model(sentiment_model, sentiment_embeddings, sentence);
    mtsa::ModelOutput sar = run_model(sarcasm_model, sarcasm_embeddings, sentence);
    mtsa::ModelOutput merged;
    merged.sentiment = std::move(sen.sentiment);
    merged.sarcasm = std::move(sar.sarcasm);
    fill(out, merged);
    out->sentiment = mtsa::coerce(out->sentiment, out->sarcasm);
  });
}

mtsa_status mtsa_model_attention(const mtsa_model* model, const mtsa_embeddings* embeddings,
                                 const char* sentence, mtsa_attention** out) {
  MTSA_REQUIRE(out, "out must not be NULL");
  return guarded([&] {
    require(model, "model");
    if (!model->checkpoint.model.has_attention()) {
      mtsa::fail(mtsa::ErrorKind::kContract,
                 "model variant " +
                     std::string(mtsa::variant_name(model->checkpoint.model.variant())) +
                     " has no attention layer");
    }
    const mtsa::ModelOutput o = run_model(model, embeddings, sentence);
    auto att = std::make_unique<mtsa_attention>();
    att->tokens = mtsa::tokenize(sentence);
    for (std::size_t i = 0; i < att->tokens.size(); ++i) {
      att->sentiment.push_back(o.alpha_sen.values()[i]);
      att->sarcasm.push_back(o.alpha_sar.values()[i]);
    }
    *out = att.release();
  });
}

size_t mtsa_attention_size(const mtsa_attention* attention) {
  return attention == nullptr ? 0 : attention->tokens.size();
}

const char* mtsa_attention_token(const mtsa_attention* attention, size_t index) {
  if (attention == nullptr || index >= attention->tokens.size()) return nullptr;
  return attention->tokens[index].c_str();
}

mtsa_status mtsa_attention_weights(const mtsa_attention* attention, size_t index,
                                   double* sentiment_weight, double* sarcasm_weight) {
  MTSA_REQUIRE(attention && sentiment_weight && sarcasm_weight,
               "attention and weight pointers must not be NULL");
  if (index >= attention->tokens.size()) {
    g_last_error = "token index " + std::to_string(index) + " out of range";
    return MTSA_ERR_INPUT;
  }
  *sentiment_weight = attention->sentiment[index];
  *sarcasm_weight = attention->sarcasm[index];
  return MTSA_OK;
}

void mtsa_attention_free(mtsa_attention* attention) { delete attention; }

mtsa_status mtsa_synthesize(const char* kind, size_t samples, size_t dim, uint64_t seed,
                            const char* corpus_path, const char* glove_path) {
  MTSA_REQUIRE(kind && corpus_path && glove_path,
               "kind, corpus_path and glove_path must not be NULL");
  return guarded([&] {
    const std::string k(kind);
    mtsa::SyntheticKind sk;
    if (k == "separable") {
      sk = mtsa::SyntheticKind::kSeparable;
    } else if (k == "sarcastic-negative") {
      sk = mtsa::SyntheticKind::kSarcasticNegative;
    } else {
      mtsa::fail(mtsa::ErrorKind::kInput,
                 "unknown synthetic kind '" + k + "' (separable, sarcastic-negative)");
    }
    const auto set = mtsa::make_synthetic(sk, samples, dim, seed);
    mtsa::write_corpus(set.corpus, corpus_path);
    mtsa::write_file(glove_path, mtsa::format_glove(set.table));
  });
}

}  // extern "C"
