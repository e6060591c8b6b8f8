// Copyright 2026 The rvvt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the rvvt library. Every object is an opaque handle owned
 * by the caller and released with its *_free function. Functions return
 * RVVT_OK or an error status; rvvt_last_error() then describes the failure
 * for the calling thread. Strings returned through char** are released with
 * rvvt_string_free. */

#ifndef RVVT_RVVT_H_
#define RVVT_RVVT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RVVT_BUILDING_LIBRARY)
#define RVVT_API __declspec(dllexport)
#else
#define RVVT_API __declspec(dllimport)
#endif
#else
#define RVVT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rvvt_status {
  RVVT_OK = 0,
  RVVT_BAD_MAGIC = 1,
  RVVT_UNSUPPORTED = 2,
  RVVT_TRUNCATED = 3,
  RVVT_MACHINE_MISMATCH = 4,
  RVVT_WIDTH_MISMATCH = 10,
  RVVT_INVALID_N = 20,
  RVVT_EMPTY_VOCABULARY = 21,
  RVVT_EMPTY_CLASS = 22,
  RVVT_SHAPE_MISMATCH = 23,
  RVVT_NON_FINITE_LOSS = 24,
  RVVT_RAGGED_ROW = 30,
  RVVT_NON_MONOTONIC_TIME = 31,
  RVVT_NEGATIVE_COUNT = 32,
  RVVT_NON_UNIFORM_PERIOD = 33,
  RVVT_UNKNOWN_EVENT = 34,
  RVVT_WINDOW_TOO_LONG = 35,
  RVVT_BAD_HEADER = 36,
  RVVT_SINGLE_CLASS = 40,
  RVVT_LENGTH_MISMATCH = 41,
  RVVT_CONSTANT_INPUT = 42,
  RVVT_INVALID_K = 43,
  RVVT_TOO_FEW_SAMPLES = 44,
  RVVT_EMPTY_ENSEMBLE = 45,
  RVVT_SPAN_OUT_OF_RANGE = 50,
  RVVT_UNKNOWN_POSITIVE_CLASS = 51,
  RVVT_INVALID_ARGUMENT = 60,
  RVVT_IO = 61,
  RVVT_FORMAT = 62,
  RVVT_INTERNAL = 99
} rvvt_status;

typedef struct rvvt_elf rvvt_elf;
typedef struct rvvt_tokens rvvt_tokens;
typedef struct rvvt_corpus rvvt_corpus;
typedef struct rvvt_vocab rvvt_vocab;
typedef struct rvvt_dataset rvvt_dataset;
typedef struct rvvt_trace rvvt_trace;
typedef struct rvvt_model rvvt_model;
typedef struct rvvt_predictions rvvt_predictions;

RVVT_API const char* rvvt_version(void);
RVVT_API const char* rvvt_status_name(rvvt_status status);
/* Nonzero when the status stems from a malformed input file rather than a
 * violated precondition. */
RVVT_API int rvvt_status_is_input_error(rvvt_status status);
RVVT_API const char* rvvt_last_error(void);
RVVT_API void rvvt_string_free(char* s);

/* ---- ELF and decoding ---- */

RVVT_API rvvt_status rvvt_elf_load(const char* path, rvvt_elf** out);
RVVT_API rvvt_status rvvt_elf_describe(const rvvt_elf* elf, char** out);
RVVT_API void rvvt_elf_free(rvvt_elf* elf);

RVVT_API rvvt_status rvvt_tokens_from_elf(const rvvt_elf* elf, rvvt_tokens** out);
RVVT_API rvvt_status rvvt_tokens_read(const char* path, rvvt_tokens** out);
RVVT_API rvvt_status rvvt_tokens_write(const rvvt_tokens* tokens, const char* path);
RVVT_API size_t rvvt_tokens_count(const rvvt_tokens* tokens);
RVVT_API const char* rvvt_tokens_at(const rvvt_tokens* tokens, size_t index);
RVVT_API void rvvt_tokens_free(rvvt_tokens* tokens);

/* ---- Labelled opcode corpora ---- */

/* A directory with labels.csv (`file,class`); listed files may be token
 * files or RISC-V ELF binaries. */
RVVT_API rvvt_status rvvt_corpus_read_dir(const char* dir, rvvt_corpus** out);
RVVT_API rvvt_status rvvt_corpus_write_dir(const rvvt_corpus* corpus, const char* dir);
/* preset: "disjoint", "identical" or "shifted". */
RVVT_API rvvt_status rvvt_corpus_synth(const char* preset, size_t count, size_t min_len, size_t max_len,
                                       uint64_t seed, rvvt_corpus** out);
RVVT_API size_t rvvt_corpus_size(const rvvt_corpus* corpus);
RVVT_API void rvvt_corpus_free(rvvt_corpus* corpus);

typedef struct rvvt_vocab_options {
  size_t n;
  size_t max_size; /* 0 keeps every surviving gram */
  size_t min_doc_freq;
  const char* selection; /* "frequency" or "info_gain" */
} rvvt_vocab_options;

RVVT_API void rvvt_vocab_options_init(rvvt_vocab_options* options);
RVVT_API rvvt_status rvvt_vocab_build(const rvvt_corpus* corpus, const rvvt_vocab_options* options,
                                      rvvt_vocab** out);
RVVT_API rvvt_status rvvt_vocab_read(const char* path, rvvt_vocab** out);
RVVT_API rvvt_status rvvt_vocab_write(const rvvt_vocab* vocab, const char* path);
RVVT_API size_t rvvt_vocab_size(const rvvt_vocab* vocab);
RVVT_API uint64_t rvvt_vocab_id(const rvvt_vocab* vocab);
RVVT_API void rvvt_vocab_free(rvvt_vocab* vocab);

/* ---- Datasets ---- */

/* norm: "relfreq", "tfidf" or "raw". */
RVVT_API rvvt_status rvvt_dataset_vectorize(const rvvt_corpus* corpus, const rvvt_vocab* vocab, const char* norm,
                                            rvvt_dataset** out);
/* vocab may be NULL; when given, the columns must match it. */
RVVT_API rvvt_status rvvt_dataset_read_features(const char* path, const rvvt_vocab* vocab, rvvt_dataset** out);
RVVT_API rvvt_status rvvt_dataset_read_windowed(const char* path, rvvt_dataset** out);
/* Writes the feature CSV or windowed CSV, whichever the dataset came from. */
RVVT_API rvvt_status rvvt_dataset_write(const rvvt_dataset* dataset, const char* path);
/* Keeps the named columns, in the given comma-separated order. */
RVVT_API rvvt_status rvvt_dataset_select_columns(const rvvt_dataset* dataset, const char* columns,
                                                 rvvt_dataset** out);
RVVT_API rvvt_status rvvt_dataset_set_class_names(rvvt_dataset* dataset, const char* names);
RVVT_API size_t rvvt_dataset_rows(const rvvt_dataset* dataset);
RVVT_API size_t rvvt_dataset_cols(const rvvt_dataset* dataset);
RVVT_API size_t rvvt_dataset_label(const rvvt_dataset* dataset, size_t row);
RVVT_API const double* rvvt_dataset_row(const rvvt_dataset* dataset, size_t row);
RVVT_API const char* rvvt_dataset_feature_name(const rvvt_dataset* dataset, size_t col);
RVVT_API void rvvt_dataset_free(rvvt_dataset* dataset);

/* ---- Counter traces ---- */

RVVT_API rvvt_status rvvt_trace_load(const char* path, rvvt_trace** out);
RVVT_API rvvt_status rvvt_trace_write(const rvvt_trace* trace, const char* path);
RVVT_API rvvt_status rvvt_trace_describe(const rvvt_trace* trace, char** out);
RVVT_API size_t rvvt_trace_rows(const rvvt_trace* trace);
/* Anomaly spans (`start_row,length,kind`) used for multi-class window labels. */
RVVT_API rvvt_status rvvt_trace_read_spans(rvvt_trace* trace, const char* path);
RVVT_API rvvt_status rvvt_trace_write_spans(const rvvt_trace* trace, const char* path);
RVVT_API void rvvt_trace_free(rvvt_trace* trace);

typedef struct rvvt_synth_trace_options {
  size_t rows;
  uint64_t period_ns;
  size_t anomalies;
  const char* kind; /* "ratio_shift", "spike" or "phase_swap" */
  double magnitude;
  size_t span_len;
  uint64_t seed;
} rvvt_synth_trace_options;

RVVT_API void rvvt_synth_trace_options_init(rvvt_synth_trace_options* options);
/* clean_out (nullable) receives the trace before injection. */
RVVT_API rvvt_status rvvt_synth_trace(const rvvt_synth_trace_options* options, rvvt_trace** clean_out,
                                      rvvt_trace** out);

typedef struct rvvt_window_options {
  size_t window_len;
  size_t stride;
  const char* stats;          /* e.g. "mean,std" */
  const char* events;         /* comma list; NULL or "" for none */
  const char* ratios;         /* e.g. "L3_MISS/L1D_MISS"; NULL or "" for none */
  const char* epsilon_policy; /* "zero" or "epsilon" */
  size_t min_overlap_rows;    /* rows of a span a window needs to be labelled */
} rvvt_window_options;

RVVT_API void rvvt_window_options_init(rvvt_window_options* options);
/* Labels come from attached spans, else from the trace mask; without either
 * the dataset has no label column. With neither events nor ratios given,
 * every event is used. */
RVVT_API rvvt_status rvvt_trace_windowize(const rvvt_trace* trace, const rvvt_window_options* options,
                                          rvvt_dataset** out);

/* ---- Feature selection ---- */

/* method: "fisher", "pearson" or "mi". score_csv receives `rank,feature,score`;
 * selected receives the comma-separated features kept under the budget.
 * Features named in `include` (comma list, nullable) are kept first. */
RVVT_API rvvt_status rvvt_select_features(const rvvt_dataset* dataset, const char* method, size_t bins,
                                          size_t budget, const char* include, char** score_csv,
                                          char** selected);

/* ---- Models ---- */

typedef struct rvvt_mlp_config {
  double learning_rate;
  size_t epochs;
  size_t batch_size;
  uint64_t seed;
  double l2_penalty;
  size_t frozen_layers;
  const size_t* hidden;
  size_t hidden_count;
} rvvt_mlp_config;

RVVT_API void rvvt_mlp_config_init(rvvt_mlp_config* config);

typedef struct rvvt_detector_config {
  const char* kind; /* "gauss", "knn", "adaboost", "bagging" or "two-stage" */
  double percentile;
  size_t k;
  size_t rounds;
  size_t bags;
  const char* base; /* bagging: "stump" or "adaboost" */
  uint64_t seed;
  int two_stage_knn;
  rvvt_mlp_config stage2;
} rvvt_detector_config;

RVVT_API void rvvt_detector_config_init(rvvt_detector_config* config);

RVVT_API rvvt_status rvvt_model_train_nb(const rvvt_dataset* dataset, double alpha, rvvt_model** out);
RVVT_API rvvt_status rvvt_model_train_mlp(const rvvt_dataset* dataset, const rvvt_mlp_config* config,
                                          rvvt_model** out);
/* config->frozen_layers counts weight layers from the input side. */
RVVT_API rvvt_status rvvt_model_fine_tune(const rvvt_model* base, const rvvt_dataset* dataset,
                                          const rvvt_mlp_config* config, rvvt_model** out);
RVVT_API rvvt_status rvvt_model_train_detector(const rvvt_dataset* dataset, const rvvt_detector_config* config,
                                               rvvt_model** out);
RVVT_API rvvt_status rvvt_model_train_pca(const rvvt_dataset* dataset, size_t k, rvvt_model** out);
RVVT_API rvvt_status rvvt_model_load(const char* path, rvvt_model** out);
RVVT_API rvvt_status rvvt_model_save(const rvvt_model* model, const char* path);
RVVT_API const char* rvvt_model_kind(const rvvt_model* model);
RVVT_API void rvvt_model_free(rvvt_model* model);

/* PCA models project the dataset; the result keeps labels and start rows. */
RVVT_API rvvt_status rvvt_model_transform(const rvvt_model* model, const rvvt_dataset* dataset,
                                          rvvt_dataset** out);

/* Static datasets give `id,predicted,score` rows; windowed datasets give
 * `window_start_row,score,verdict` rows. */
RVVT_API rvvt_status rvvt_model_predict(const rvvt_model* model, const rvvt_dataset* dataset,
                                        rvvt_predictions** out);
RVVT_API rvvt_status rvvt_predictions_read(const char* path, rvvt_predictions** out);
RVVT_API rvvt_status rvvt_predictions_write(const rvvt_predictions* predictions, const char* path);
RVVT_API size_t rvvt_predictions_count(const rvvt_predictions* predictions);
RVVT_API const char* rvvt_predictions_label(const rvvt_predictions* predictions, size_t index);
RVVT_API double rvvt_predictions_score(const rvvt_predictions* predictions, size_t index);
RVVT_API void rvvt_predictions_free(rvvt_predictions* predictions);

/* truth_path: a windowed CSV with labels, a corpus labels.csv, or a feature
 * CSV. positive and class_names (comma list) may be NULL. report receives
 * a JSON object. */
RVVT_API rvvt_status rvvt_evaluate(const rvvt_predictions* predictions, const char* truth_path,
                                   const char* positive, const char* class_names, char** report);

#ifdef __cplusplus
}
#endif

#endif /* RVVT_RVVT_H_ */
