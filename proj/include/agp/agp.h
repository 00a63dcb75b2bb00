/*
 * Copyright 2026 The agreement-probe Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the agreement-probe library. All objects are opaque
 * handles created by agp_*_create/_load/_generate functions and released
 * with the matching agp_*_free. Every fallible call returns an agp_status;
 * on failure the thread's last error message describes the problem.
 */
#ifndef AGP_AGP_H
#define AGP_AGP_H

#include <stddef.h>
#include <stdint.h>

#if defined(AGP_BUILDING_LIBRARY)
#define AGP_API __attribute__((visibility("default")))
#else
#define AGP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum agp_status {
  AGP_OK = 0,
  AGP_ERR_INVALID_ARGUMENT = 1,
  AGP_ERR_CONSTRAINT = 2,
  AGP_ERR_PARSE = 3,
  AGP_ERR_IO = 4,
  AGP_ERR_FORMAT = 5,
  AGP_ERR_DIMENSION = 6,
  AGP_ERR_NUMERIC = 7,
  AGP_ERR_SUBSTITUTION = 8,
  AGP_ERR_INTERNAL = 9
} agp_status;

/* Short stable identifier, e.g. "parse_error". */
AGP_API const char* agp_status_name(agp_status status);
/* Message of the last failed call on this thread; "" if none. */
AGP_API const char* agp_last_error(void);

/* Seed for a named sub-task: every random stream derives from one experiment
   seed this way. */
AGP_API uint64_t agp_derive_seed(uint64_t seed, const char* task, uint64_t index);

typedef struct agp_vocab agp_vocab;
typedef struct agp_corpus agp_corpus;
typedef struct agp_model agp_model;
typedef struct agp_dc_set agp_dc_set;
typedef struct agp_matrix agp_matrix;
typedef struct agp_report agp_report;

/* ---- vocabulary --------------------------------------------------------- */

AGP_API agp_status agp_vocab_builtin(agp_vocab** out);
AGP_API agp_status agp_vocab_load(const char* path, agp_vocab** out);
AGP_API size_t agp_vocab_size(const agp_vocab* vocab);
AGP_API void agp_vocab_free(agp_vocab* vocab);

/* ---- corpora ------------------------------------------------------------ */

/* Writes the canonical form of a WD spec string into buf (NUL-terminated). */
AGP_API agp_status agp_spec_normalize(const char* wd_spec, char* buf, size_t buf_len);

AGP_API agp_status agp_corpus_create(agp_corpus** out);
/* n sentences with alternating subject number. */
AGP_API agp_status agp_corpus_generate(const agp_vocab* vocab, const char* wd_spec, size_t n,
                                       uint64_t seed, agp_corpus** out);
AGP_API agp_status agp_corpus_read_tsv(const agp_vocab* vocab, const char* path, agp_corpus** out);
AGP_API agp_status agp_corpus_write_tsv(const agp_corpus* corpus, const agp_vocab* vocab,
                                        const char* path);
AGP_API agp_status agp_corpus_append(agp_corpus* dst, const agp_corpus* src);
AGP_API agp_status agp_corpus_filter(const agp_corpus* corpus, const char* wd_spec,
                                     agp_corpus** out);
/* Sentences of corpus whose tokens do not occur in other. */
AGP_API agp_status agp_corpus_remove_overlap(const agp_corpus* corpus, const agp_corpus* other,
                                             agp_corpus** out);
AGP_API agp_status agp_corpus_balance(const agp_corpus* corpus, uint64_t seed, agp_corpus** out);
/* n nonce variants of every sentence. */
AGP_API agp_status agp_corpus_nonce(const agp_corpus* corpus, const agp_vocab* vocab, size_t n,
                                    uint64_t seed, agp_corpus** out);
AGP_API size_t agp_corpus_size(const agp_corpus* corpus);
/* Number of sentences with at least one validation violation. */
AGP_API agp_status agp_corpus_count_invalid(const agp_corpus* corpus, const agp_vocab* vocab,
                                            size_t* out);
AGP_API void agp_corpus_free(agp_corpus* corpus);

/* ---- language model ----------------------------------------------------- */

typedef enum agp_optimizer { AGP_OPTIMIZER_SGD = 0, AGP_OPTIMIZER_ADAM = 1 } agp_optimizer;

typedef struct agp_train_params {
  double lr;
  int epochs;
  double clip;
  uint64_t seed;
  size_t batch_size;
  agp_optimizer optimizer;
} agp_train_params;

AGP_API void agp_train_params_default(agp_train_params* params);

AGP_API agp_status agp_model_create(size_t vocab, size_t embed, size_t hidden, uint64_t seed,
                                    agp_model** out);
AGP_API agp_status agp_model_load(const char* path, agp_model** out);
AGP_API agp_status agp_model_save(const agp_model* model, const char* path);
AGP_API agp_status agp_model_dims(const agp_model* model, size_t* vocab, size_t* embed,
                                  size_t* hidden, size_t* layers);
/* Per-epoch mean token loss goes to loss_log (capacity loss_cap entries,
   may be NULL); *epochs_done receives the number of epochs run. */
AGP_API agp_status agp_model_train(agp_model* model, const agp_corpus* corpus,
                                   const agp_train_params* params, double* loss_log,
                                   size_t loss_cap, size_t* epochs_done);
AGP_API agp_status agp_model_perplexity(const agp_model* model, const agp_corpus* corpus,
                                        double* out);
/* outcomes, when non-NULL, receives agp_corpus_size() bytes of 0/1. */
AGP_API agp_status agp_model_agreement(const agp_model* model, const agp_corpus* corpus,
                                       double* accuracy, unsigned char* outcomes);
AGP_API agp_status agp_model_split(const agp_model* model, const agp_corpus* corpus,
                                   agp_corpus** correct, agp_corpus** wrong);
AGP_API void agp_model_free(agp_model* model);

/* ---- diagnostic classifiers --------------------------------------------- */

/* Components are indexed 0..9 as h0 c0 f0 i0 o0 h1 c1 f1 i1 o1. */
AGP_API agp_status agp_component_parse(const char* name, int* out);
AGP_API const char* agp_component_name(int component);

typedef struct agp_dc_params {
  double lr;
  int epochs;
  double l2;
  uint64_t seed;
} agp_dc_params;

AGP_API void agp_dc_params_default(agp_dc_params* params);

AGP_API agp_status agp_dc_set_create(agp_dc_set** out);
AGP_API agp_status agp_dc_set_load(const char* path, agp_dc_set** out);
AGP_API agp_status agp_dc_set_save(const agp_dc_set* set, const char* path);
AGP_API size_t agp_dc_set_size(const agp_dc_set* set);
AGP_API agp_status agp_dc_set_info(const agp_dc_set* set, size_t index, int* component,
                                   char* scope_buf, size_t scope_len, size_t* dim);
AGP_API void agp_dc_set_free(agp_dc_set* set);

/* Trains one DC on the model's activations over corpus and appends it to
   set. scope is "pooled", "t<n>" or "t<a>..<b>". */
AGP_API agp_status agp_dc_train(const agp_model* model, const agp_corpus* corpus, int component,
                                const char* scope, const agp_dc_params* params, agp_dc_set* set);
/* Same, with labels permuted before training (permutation null). */
AGP_API agp_status agp_dc_train_shuffled(const agp_model* model, const agp_corpus* corpus,
                                         int component, const char* scope,
                                         const agp_dc_params* params, agp_dc_set* set);
/* Accuracy of DC index over corpus activations in the DC's own scope. */
AGP_API agp_status agp_dc_accuracy(const agp_dc_set* set, size_t index, const agp_model* model,
                                   const agp_corpus* corpus, double* out);
/* Same, against labels permuted across sentences with the given seed. Pairs
   with agp_dc_train_shuffled to give the permutation-null score. */
AGP_API agp_status agp_dc_accuracy_shuffled(const agp_dc_set* set, size_t index,
                                            const agp_model* model, const agp_corpus* corpus,
                                            uint64_t seed, double* out);

/* CSV rows "set,component,timestep,accuracy,count" for every DC in set,
   evaluated per relative timestep over all positions of corpus. */
AGP_API agp_status agp_dc_write_curves(const agp_dc_set* set, const agp_model* model,
                                       const agp_corpus* corpus, const char* set_label,
                                       const char* path, int append);

/* ---- generalization matrices -------------------------------------------- */

AGP_API agp_status agp_tgm(const agp_model* model, const agp_corpus* train,
                           const agp_corpus* test, int component, int t_from, int t_to,
                           const agp_dc_params* params, agp_matrix** out);
AGP_API agp_status agp_sgm(const agp_model* model, const agp_corpus* train,
                           const agp_corpus* test, int timestep, const agp_dc_params* params,
                           agp_matrix** out);

typedef enum agp_fixture {
  AGP_FIXTURE_CONSTANT = 0, /* label encoded identically at every timestep */
  AGP_FIXTURE_ONSET = 1     /* label encoded at timestep 0 only */
} agp_fixture;

/* Temporal matrix over synthetic activations of dimension dim at timesteps
   0..timesteps-1, n_train / n_test sentences each. */
AGP_API agp_status agp_tgm_fixture(agp_fixture kind, size_t n_train, size_t n_test, size_t dim,
                                   int timesteps, const agp_dc_params* params, agp_matrix** out);
AGP_API size_t agp_matrix_rows(const agp_matrix* m);
AGP_API size_t agp_matrix_cols(const agp_matrix* m);
AGP_API double agp_matrix_at(const agp_matrix* m, size_t row, size_t col);
/* Writes <prefix>.csv, <prefix>_counts.csv and <prefix>.svg. */
AGP_API agp_status agp_matrix_write(const agp_matrix* m, const char* prefix, const char* title);
AGP_API void agp_matrix_free(agp_matrix* m);

/* ---- intervention ------------------------------------------------------- */

typedef enum agp_error_kind { AGP_ERROR_SQUARED = 0, AGP_ERROR_CROSS_ENTROPY = 1 } agp_error_kind;

typedef struct agp_intervention_params {
  double eta;
  int apply_at;
  unsigned targets; /* bit i set = component i; only h/c components allowed */
  agp_error_kind error;
  int steps;
} agp_intervention_params;

AGP_API void agp_intervention_params_default(agp_intervention_params* params);

/* dcs must hold a DC scoped at t<apply_at> for every target. probes may be
   NULL; otherwise every DC in it is evaluated over time on plain and
   intervened traces. */
AGP_API agp_status agp_intervention_compare(const agp_model* model, const agp_corpus* testset,
                                            const agp_dc_set* dcs,
                                            const agp_intervention_params* params,
                                            const agp_dc_set* probes, agp_report** out);
AGP_API agp_status agp_report_accuracy(const agp_report* report, double* without, double* with);
AGP_API agp_status agp_report_dlogp(const agp_report* report, double* mean_abs, double* max_abs);
/* Writes <dir>/intervention.csv, words.csv, curves.csv and summary.json. */
AGP_API agp_status agp_report_write(const agp_report* report, const agp_vocab* vocab,
                                    uint64_t seed, const char* dir);
AGP_API void agp_report_free(agp_report* report);

#ifdef __cplusplus
}
#endif

#endif /* AGP_AGP_H */
