/* SPDX-License-Identifier: Apache-2.0
 * Copyright 2026 The mtsa Authors
 *
 * C interface to the joint sentiment / sarcasm classifier library.
 *
 * All objects are opaque handles created by the library and released with the
 * matching *_free function. Every fallible call returns an mtsa_status; on
 * failure a human-readable message is available from mtsa_last_error() on the
 * same thread until the next call into the library. Strings returned through
 * char** out-parameters are heap allocated and must be released with
 * mtsa_string_free().
 *
 * Handles are not internally synchronised. Distinct handles may be used from
 * distinct threads; a model or embeddings handle may be shared read-only.
 */
#ifndef MTSA_MTSA_H_
#define MTSA_MTSA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MTSA_BUILDING_LIBRARY)
#define MTSA_API __declspec(dllexport)
#else
#define MTSA_API __declspec(dllimport)
#endif
#else
#define MTSA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mtsa_status {
  MTSA_OK = 0,
  MTSA_ERR_INPUT = 1,
  MTSA_ERR_SCHEMA = 2,
  MTSA_ERR_VALUE = 3,
  MTSA_ERR_PARSE = 4,
  MTSA_ERR_DIMENSION = 5,
  MTSA_ERR_CONFIG = 6,
  MTSA_ERR_NUMERIC = 7,
  MTSA_ERR_CONTRACT = 8,
  MTSA_ERR_IO = 9,
  MTSA_ERR_VOCAB_MISMATCH = 10,
  MTSA_ERR_NULL_ARGUMENT = 11,
  MTSA_ERR_INTERNAL = 12
} mtsa_status;

typedef enum mtsa_task { MTSA_TASK_SENTIMENT = 0, MTSA_TASK_SARCASM = 1 } mtsa_task;

typedef struct mtsa_corpus mtsa_corpus;
typedef struct mtsa_embeddings mtsa_embeddings;
typedef struct mtsa_model mtsa_model;
typedef struct mtsa_report mtsa_report;
typedef struct mtsa_attention mtsa_attention;

typedef struct mtsa_corpus_summary {
  size_t samples;
  size_t positives;
  size_t sarcastic;
  size_t max_len;
  size_t vocabulary;
} mtsa_corpus_summary;

typedef struct mtsa_task_metrics {
  double precision; /* percent */
  double recall;
  double f_score;
} mtsa_task_metrics;

typedef struct mtsa_prediction {
  int has_sentiment;
  int sentiment; /* 0 negative, 1 positive */
  double sentiment_probs[2];
  int has_sarcasm;
  int sarcasm; /* 0 no, 1 yes */
  double sarcasm_probs[2];
} mtsa_prediction;

/* ---- library ---------------------------------------------------------- */

MTSA_API const char* mtsa_version(void);
MTSA_API const char* mtsa_last_error(void);
MTSA_API const char* mtsa_status_name(mtsa_status status);
MTSA_API void mtsa_string_free(char* s);

/* 64-bit FNV-1a digest of a file, as 16 hex digits. */
MTSA_API mtsa_status mtsa_file_digest(const char* path, char** out_hex);

/* Fills every default into a configuration document (JSON; NULL or "" for
 * all defaults) and validates it. */
MTSA_API mtsa_status mtsa_config_resolve(const char* config_json, char** out_json);

/* Forces sentiment to negative when sarcasm_label is 1. */
MTSA_API int mtsa_coerce(int sentiment_label, int sarcasm_label);

/* ---- corpus ----------------------------------------------------------- */

/* Reads a canonical corpus (columns id, text, sentiment, sarcasm). */
MTSA_API mtsa_status mtsa_corpus_load(const char* path, mtsa_corpus** out);
/* Normalises a corpus in canonical or upstream layout and writes the
 * canonical file. `out` may be NULL. */
MTSA_API mtsa_status mtsa_corpus_prepare(const char* input_path, const char* output_path,
                                         mtsa_corpus** out);
MTSA_API mtsa_status mtsa_corpus_summary_get(const mtsa_corpus* corpus,
                                             mtsa_corpus_summary* out);
MTSA_API void mtsa_corpus_free(mtsa_corpus* corpus);

/* ---- embeddings --------------------------------------------------------- */

/* Loads GloVe vectors of dimension `dim` for the corpus vocabulary.
 * `coverage` (nullable) receives the fraction of vocabulary found. */
MTSA_API mtsa_status mtsa_embeddings_load(const char* glove_path, const mtsa_corpus* corpus,
                                          size_t dim, mtsa_embeddings** out, double* coverage);
/* Loads GloVe vectors for the vocabulary recorded in a model. */
MTSA_API mtsa_status mtsa_embeddings_load_for_model(const char* glove_path,
                                                    const mtsa_model* model,
                                                    mtsa_embeddings** out, double* coverage);
MTSA_API void mtsa_embeddings_free(mtsa_embeddings* embeddings);

/* ---- training and evaluation ------------------------------------------ */

/* Trains one model on the whole corpus. `manifest_json` (nullable) is stored
 * in the model's checkpoint. `trace_path` (nullable) receives one JSON line
 * per epoch: {"epoch", "J_sen", "J_sar", "joint"}. */
MTSA_API mtsa_status mtsa_train(const mtsa_corpus* corpus, const mtsa_embeddings* embeddings,
                                const char* config_json, const char* manifest_json,
                                const char* trace_path, mtsa_model** out);

/* k-fold cross-validation. When `checkpoint_dir` is non-NULL every fold
 * model is saved there as fold-<k>[-<role>].ckpt. */
MTSA_API mtsa_status mtsa_crossval(const mtsa_corpus* corpus, const mtsa_embeddings* embeddings,
                                   const char* config_json, size_t jobs,
                                   const char* checkpoint_dir, const char* manifest_json,
                                   mtsa_report** out);

MTSA_API mtsa_status mtsa_report_json(const mtsa_report* report, char** out_json);
MTSA_API mtsa_status mtsa_report_table(const mtsa_report* report, char** out_text);
/* `present` receives 0 when the report has no columns for the task. */
MTSA_API mtsa_status mtsa_report_task(const mtsa_report* report, mtsa_task task,
                                      mtsa_task_metrics* out, int* present);
MTSA_API mtsa_status mtsa_report_average_f(const mtsa_report* report, double* out, int* present);
MTSA_API void mtsa_report_free(mtsa_report* report);

/* ---- models ----------------------------------------------------------- */

MTSA_API mtsa_status mtsa_model_save(const mtsa_model* model, const char* path);
MTSA_API mtsa_status mtsa_model_load(const char* path, mtsa_model** out);
/* {"config": ..., "manifest": ..., "parameters": N, "embedding_fingerprint": ...} */
MTSA_API mtsa_status mtsa_model_info(const mtsa_model* model, char** out_json);
MTSA_API void mtsa_model_free(mtsa_model* model);

/* Refuses with MTSA_ERR_VOCAB_MISMATCH when `embeddings` differ from the
 * table the model was trained with. */
MTSA_API mtsa_status mtsa_model_predict(const mtsa_model* model, const mtsa_embeddings* embeddings,
                                        const char* sentence, mtsa_prediction* out);
/* Standalone sentiment model coerced by a standalone sarcasm model. */
MTSA_API mtsa_status mtsa_predict_coerced(const mtsa_model* sentiment_model,
                                          const mtsa_embeddings* sentiment_embeddings,
                                          const mtsa_model* sarcasm_model,
                                          const mtsa_embeddings* sarcasm_embeddings,
                                          const char* sentence, mtsa_prediction* out);

/* Per-token attention weights of an attention model (padding omitted). */
MTSA_API mtsa_status mtsa_model_attention(const mtsa_model* model,
                                          const mtsa_embeddings* embeddings,
                                          const char* sentence, mtsa_attention** out);
MTSA_API size_t mtsa_attention_size(const mtsa_attention* attention);
MTSA_API const char* mtsa_attention_token(const mtsa_attention* attention, size_t index);
MTSA_API mtsa_status mtsa_attention_weights(const mtsa_attention* attention, size_t index,
                                            double* sentiment_weight, double* sarcasm_weight);
MTSA_API void mtsa_attention_free(mtsa_attention* attention);

/* ---- synthetic data ----------------------------------------------------- */

/* kind: "separable" or "sarcastic-negative". Writes a canonical corpus and a
 * matching GloVe-format embedding file. */
MTSA_API mtsa_status mtsa_synthesize(const char* kind, size_t samples, size_t dim, uint64_t seed,
                                     const char* corpus_path, const char* glove_path);

#ifdef __cplusplus
}
#endif

#endif /* MTSA_MTSA_H_ */
