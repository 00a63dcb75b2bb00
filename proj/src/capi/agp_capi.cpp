// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#include "agp/agp.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

#include "agp/corpus.hpp"
#include "agp/diagnostic.hpp"
#include "agp/error.hpp"
#include "agp/intervention.hpp"
#include "agp/lstm.hpp"
#include "agp/report.hpp"
#include "agp/vocab.hpp"

struct agp_vocab {
  agp::Vocab vocab;
};
struct agp_corpus {
  agp::Corpus corpus;
};
struct agp_model {
  agp::LstmLm model;
};
struct agp_dc_set {
  std::vector<agp::DiagnosticClassifier> dcs;
};
struct agp_matrix {
  agp::GeneralizationMatrix matrix;
};
struct agp_report {
  agp::InterventionReport report;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
agp_status guard(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return AGP_OK;
  } catch (const agp::ConstraintError& e) {
    g_last_error = e.what();
    return AGP_ERR_CONSTRAINT;
  } catch (const agp::ParseError& e) {
    g_last_error = e.what();
    return AGP_ERR_PARSE;
  } catch (const agp::IoError& e) {
    g_last_error = e.what();
    return AGP_ERR_IO;
  } catch (const agp::FormatError& e) {
    g_last_error = e.what();
    return AGP_ERR_FORMAT;
  } catch (const agp::DimensionError& e) {
    g_last_error = e.what();
    return AGP_ERR_DIMENSION;
  } catch (const agp::NumericError& e) {
    g_last_error = e.what();
    return AGP_ERR_NUMERIC;
  } catch (const agp::SubstitutionError& e) {
    g_last_error = e.what();
    return AGP_ERR_SUBSTITUTION;
  } catch (const agp::Error& e) {
    g_last_error = e.what();
    return AGP_ERR_INVALID_ARGUMENT;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return AGP_ERR_INVALID_ARGUMENT;
  } catch (const std::out_of_range& e) {
    g_last_error = e.what();
    return AGP_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AGP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return AGP_ERR_INTERNAL;
  }
}

template <typename T>
const T& deref(const T* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string(what) + " is NULL");
  return *p;
}

template <typename T>
T& deref(T* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string(what) + " is NULL");
  return *p;
}

const char* deref(const char* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string(what) + " is NULL");
  return p;
}

template <typename T>
void put(T** out, std::unique_ptr<T> value) {
  if (!out) throw std::invalid_argument("output pointer is NULL");
  *out = value.release();
}

void copy_string(const std::string& s, char* buf, std::size_t len) {
  if (!buf || len == 0) throw std::invalid_argument("output buffer is NULL or empty");
  if (s.size() + 1 > len) throw std::invalid_argument("output buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
}

agp::ComponentId component_from(int index) {
  if (index < 0 || index >= 10) {
    throw std::invalid_argument("component index " + std::to_string(index) + " outside 0..9");
  }
  return agp::ComponentId::all()[static_cast<std::size_t>(index)];
}

agp::DcHyper hyper_from(const agp_dc_params* p) {
  agp::DcHyper h;
  if (p) {
    h.lr = p->lr;
    h.epochs = p->epochs;
    h.l2 = p->l2;
    h.seed = p->seed;
  }
  return h;
}

agp::InterventionConfig config_from(const agp_intervention_params* p) {
  agp::InterventionConfig cfg;
  if (!p) return cfg;
  cfg.eta = p->eta;
  cfg.apply_at = p->apply_at;
  cfg.error = p->error == AGP_ERROR_CROSS_ENTROPY ? agp::ErrorKind::CrossEntropy
                                                  : agp::ErrorKind::Squared;
  cfg.steps = p->steps;
  cfg.targets.clear();
  for (int i = 0; i < 10; ++i) {
    if (p->targets & (1u << i)) cfg.targets.push_back(component_from(i));
  }
  if (p->targets >> 10) throw std::invalid_argument("target mask has bits above component 9");
  return cfg;
}

}  // namespace

extern "C" {

const char* agp_status_name(agp_status status) {
  switch (status) {
    case AGP_OK: return "ok";
    case AGP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case AGP_ERR_CONSTRAINT: return "constraint_error";
    case AGP_ERR_PARSE: return "parse_error";
    case AGP_ERR_IO: return "io_error";
    case AGP_ERR_FORMAT: return "format_error";
    case AGP_ERR_DIMENSION: return "dimension_error";
    case AGP_ERR_NUMERIC: return "numeric_error";
    case AGP_ERR_SUBSTITUTION: return "substitution_error";
    case AGP_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* agp_last_error(void) { return g_last_error.c_str(); }

uint64_t agp_derive_seed(uint64_t seed, const char* task, uint64_t index) {
  return agp::derive_seed(seed, task ? task : "", index);
}

// ---- vocabulary

agp_status agp_vocab_builtin(agp_vocab** out) {
  return guard([&] { put(out, std::make_unique<agp_vocab>(agp_vocab{agp::Vocab::builtin()})); });
}

agp_status agp_vocab_load(const char* path, agp_vocab** out) {
  return guard([&] {
    put(out, std::make_unique<agp_vocab>(agp_vocab{agp::Vocab::load(deref(path, "path"))}));
  });
}

size_t agp_vocab_size(const agp_vocab* vocab) { return vocab ? vocab->vocab.size() : 0; }

void agp_vocab_free(agp_vocab* vocab) { delete vocab; }

// ---- corpora

agp_status agp_spec_normalize(const char* wd_spec, char* buf, size_t buf_len) {
  return guard([&] {
    copy_string(agp::ConstraintSpec::parse(deref(wd_spec, "wd_spec")).format(), buf, buf_len);
  });
}

agp_status agp_corpus_create(agp_corpus** out) {
  return guard([&] { put(out, std::make_unique<agp_corpus>()); });
}

agp_status agp_corpus_generate(const agp_vocab* vocab, const char* wd_spec, size_t n,
                               uint64_t seed, agp_corpus** out) {
  return guard([&] {
    const auto spec = agp::ConstraintSpec::parse(deref(wd_spec, "wd_spec"));
    agp::Rng rng(seed);
    put(out, std::make_unique<agp_corpus>(
                 agp_corpus{agp::generate_corpus(spec, n, deref(vocab, "vocab").vocab, rng)}));
  });
}

agp_status agp_corpus_read_tsv(const agp_vocab* vocab, const char* path, agp_corpus** out) {
  return guard([&] {
    put(out, std::make_unique<agp_corpus>(
                 agp_corpus{agp::read_tsv(deref(path, "path"), deref(vocab, "vocab").vocab)}));
  });
}

agp_status agp_corpus_write_tsv(const agp_corpus* corpus, const agp_vocab* vocab, const char* path) {
  return guard([&] {
    agp::write_tsv(deref(corpus, "corpus").corpus, deref(path, "path"), deref(vocab, "vocab").vocab);
  });
}

agp_status agp_corpus_append(agp_corpus* dst, const agp_corpus* src) {
  return guard([&] {
    auto& d = deref(dst, "dst").corpus;
    const auto& s = deref(src, "src").corpus;
    d.insert(d.end(), s.begin(), s.end());
  });
}

agp_status agp_corpus_filter(const agp_corpus* corpus, const char* wd_spec, agp_corpus** out) {
  return guard([&] {
    const auto spec = agp::ConstraintSpec::parse(deref(wd_spec, "wd_spec"));
    put(out, std::make_unique<agp_corpus>(
                 agp_corpus{agp::filter_corpus(deref(corpus, "corpus").corpus, spec)}));
  });
}

agp_status agp_corpus_remove_overlap(const agp_corpus* corpus, const agp_corpus* other,
                                     agp_corpus** out) {
  return guard([&] {
    put(out, std::make_unique<agp_corpus>(agp_corpus{
                 agp::remove_overlap(deref(corpus, "corpus").corpus, deref(other, "other").corpus)}));
  });
}

agp_status agp_corpus_balance(const agp_corpus* corpus, uint64_t seed, agp_corpus** out) {
  return guard([&] {
    agp::Rng rng(seed);
    put(out, std::make_unique<agp_corpus>(
                 agp_corpus{agp::balance_numbers(deref(corpus, "corpus").corpus, rng)}));
  });
}

agp_status agp_corpus_nonce(const agp_corpus* corpus, const agp_vocab* vocab, size_t n,
                            uint64_t seed, agp_corpus** out) {
  return guard([&] {
    agp::Rng rng(seed);
    agp::Corpus result;
    for (const auto& s : deref(corpus, "corpus").corpus) {
      auto variants = agp::nonce_variants(s, n, deref(vocab, "vocab").vocab, rng);
      result.insert(result.end(), variants.begin(), variants.end());
    }
    put(out, std::make_unique<agp_corpus>(agp_corpus{std::move(result)}));
  });
}

size_t agp_corpus_size(const agp_corpus* corpus) { return corpus ? corpus->corpus.size() : 0; }

agp_status agp_corpus_count_invalid(const agp_corpus* corpus, const agp_vocab* vocab, size_t* out) {
  return guard([&] {
    std::size_t bad = 0;
    for (const auto& s : deref(corpus, "corpus").corpus) {
      if (!agp::validate_sentence(s, deref(vocab, "vocab").vocab).empty()) ++bad;
    }
    deref(out, "out") = bad;
  });
}

void agp_corpus_free(agp_corpus* corpus) { delete corpus; }

// ---- language model

void agp_train_params_default(agp_train_params* params) {
  if (!params) return;
  const agp::TrainHyper h;
  params->lr = h.lr;
  params->epochs = h.epochs;
  params->clip = h.clip;
  params->seed = h.seed;
  params->batch_size = h.batch_size;
  params->optimizer = h.optimizer == agp::Optimizer::Sgd ? AGP_OPTIMIZER_SGD : AGP_OPTIMIZER_ADAM;
}

agp_status agp_model_create(size_t vocab, size_t embed, size_t hidden, uint64_t seed,
                            agp_model** out) {
  return guard([&] {
    put(out, std::make_unique<agp_model>(
                 agp_model{agp::LstmLm::initialized({vocab, embed, hidden, 2}, seed)}));
  });
}

agp_status agp_model_load(const char* path, agp_model** out) {
  return guard([&] {
    put(out, std::make_unique<agp_model>(agp_model{agp::load_checkpoint(deref(path, "path"))}));
  });
}

agp_status agp_model_save(const agp_model* model, const char* path) {
  return guard([&] { agp::save_checkpoint(deref(model, "model").model, deref(path, "path")); });
}

agp_status agp_model_dims(const agp_model* model, size_t* vocab, size_t* embed, size_t* hidden,
                          size_t* layers) {
  return guard([&] {
    const auto& d = deref(model, "model").model.dims();
    if (vocab) *vocab = d.vocab;
    if (embed) *embed = d.embed;
    if (hidden) *hidden = d.hidden;
    if (layers) *layers = d.layers;
  });
}

agp_status agp_model_train(agp_model* model, const agp_corpus* corpus,
                           const agp_train_params* params, double* loss_log, size_t loss_cap,
                           size_t* epochs_done) {
  return guard([&] {
    const auto& p = deref(params, "params");
    agp::TrainHyper h;
    h.lr = p.lr;
    h.epochs = p.epochs;
    h.clip = p.clip;
    h.seed = p.seed;
    h.batch_size = p.batch_size;
    h.optimizer = p.optimizer == AGP_OPTIMIZER_SGD ? agp::Optimizer::Sgd : agp::Optimizer::Adam;
    const auto log = agp::train_lm(deref(model, "model").model, deref(corpus, "corpus").corpus, h,
                                   agp::kEndToken);
    if (loss_log) {
      for (std::size_t i = 0; i < log.epoch_loss.size() && i < loss_cap; ++i) loss_log[i] = log.epoch_loss[i];
    }
    if (epochs_done) *epochs_done = log.epoch_loss.size();
  });
}

agp_status agp_model_perplexity(const agp_model* model, const agp_corpus* corpus, double* out) {
  return guard([&] {
    std::vector<std::vector<int>> seqs;
    for (const auto& s : deref(corpus, "corpus").corpus) seqs.push_back(s.tokens);
    deref(out, "out") = agp::perplexity(deref(model, "model").model, seqs, agp::kEndToken).perplexity;
  });
}

agp_status agp_model_agreement(const agp_model* model, const agp_corpus* corpus, double* accuracy,
                               unsigned char* outcomes) {
  return guard([&] {
    const auto r = agp::agreement_accuracy(deref(model, "model").model, deref(corpus, "corpus").corpus);
    deref(accuracy, "accuracy") = r.accuracy;
    if (outcomes) {
      for (std::size_t i = 0; i < r.outcomes.size(); ++i) outcomes[i] = r.outcomes[i] ? 1 : 0;
    }
  });
}

agp_status agp_model_split(const agp_model* model, const agp_corpus* corpus, agp_corpus** correct,
                           agp_corpus** wrong) {
  return guard([&] {
    if (!correct || !wrong) throw std::invalid_argument("output pointer is NULL");
    auto split = agp::split_correct_wrong(deref(model, "model").model, deref(corpus, "corpus").corpus);
    auto c = std::make_unique<agp_corpus>(agp_corpus{std::move(split.correct)});
    auto w = std::make_unique<agp_corpus>(agp_corpus{std::move(split.wrong)});
    *correct = c.release();
    *wrong = w.release();
  });
}

void agp_model_free(agp_model* model) { delete model; }

// ---- diagnostic classifiers

agp_status agp_component_parse(const char* name, int* out) {
  return guard([&] { deref(out, "out") = agp::ComponentId::parse(deref(name, "name")).index(); });
}

const char* agp_component_name(int component) {
  static constexpr const char* kNames[] = {"h0", "c0", "f0", "i0", "o0",
                                           "h1", "c1", "f1", "i1", "o1"};
  return component >= 0 && component < 10 ? kNames[component] : "";
}

void agp_dc_params_default(agp_dc_params* params) {
  if (!params) return;
  const agp::DcHyper h;
  params->lr = h.lr;
  params->epochs = h.epochs;
  params->l2 = h.l2;
  params->seed = h.seed;
}

agp_status agp_dc_set_create(agp_dc_set** out) {
  return guard([&] { put(out, std::make_unique<agp_dc_set>()); });
}

agp_status agp_dc_set_load(const char* path, agp_dc_set** out) {
  return guard([&] {
    put(out, std::make_unique<agp_dc_set>(agp_dc_set{agp::load_dcs(deref(path, "path"))}));
  });
}

agp_status agp_dc_set_save(const agp_dc_set* set, const char* path) {
  return guard([&] { agp::save_dcs(deref(set, "set").dcs, deref(path, "path")); });
}

size_t agp_dc_set_size(const agp_dc_set* set) { return set ? set->dcs.size() : 0; }

agp_status agp_dc_set_info(const agp_dc_set* set, size_t index, int* component, char* scope_buf,
                           size_t scope_len, size_t* dim) {
  return guard([&] {
    const auto& dc = deref(set, "set").dcs.at(index);
    if (component) *component = dc.component.index();
    if (scope_buf) copy_string(dc.scope.format(), scope_buf, scope_len);
    if (dim) *dim = dc.w.size();
  });
}

void agp_dc_set_free(agp_dc_set* set) { delete set; }

namespace {

agp_status train_into(const agp_model* model, const agp_corpus* corpus, int component,
                      const char* scope, const agp_dc_params* params, agp_dc_set* set,
                      bool shuffled) {
  return guard([&] {
    auto& target = deref(set, "set");
    const auto sc = agp::TimestepScope::parse(deref(scope, "scope"));
    auto data = agp::extract_activations(deref(model, "model").model, deref(corpus, "corpus").corpus,
                                         component_from(component), sc);
    const auto hyper = hyper_from(params);
    if (shuffled) {
      agp::Rng rng(agp::derive_seed(hyper.seed, "permutation-null"));
      data = agp::shuffle_labels(data, rng);
    }
    target.dcs.push_back(agp::train_dc(data, hyper));
  });
}

}  // namespace

agp_status agp_dc_train(const agp_model* model, const agp_corpus* corpus, int component,
                        const char* scope, const agp_dc_params* params, agp_dc_set* set) {
  return train_into(model, corpus, component, scope, params, set, false);
}

agp_status agp_dc_train_shuffled(const agp_model* model, const agp_corpus* corpus, int component,
                                 const char* scope, const agp_dc_params* params, agp_dc_set* set) {
  return train_into(model, corpus, component, scope, params, set, true);
}

agp_status agp_dc_accuracy(const agp_dc_set* set, size_t index, const agp_model* model,
                           const agp_corpus* corpus, double* out) {
  return guard([&] {
    const auto& dc = deref(set, "set").dcs.at(index);
    const auto data = agp::extract_activations(deref(model, "model").model,
                                               deref(corpus, "corpus").corpus, dc.component, dc.scope);
    deref(out, "out") = agp::dc_accuracy(dc, data);
  });
}

agp_status agp_dc_accuracy_shuffled(const agp_dc_set* set, size_t index, const agp_model* model,
                                    const agp_corpus* corpus, uint64_t seed, double* out) {
  return guard([&] {
    const auto& dc = deref(set, "set").dcs.at(index);
    const auto data = agp::extract_activations(deref(model, "model").model,
                                               deref(corpus, "corpus").corpus, dc.component, dc.scope);
    agp::Rng rng(seed);
    deref(out, "out") = agp::dc_accuracy(dc, agp::shuffle_labels(data, rng));
  });
}

agp_status agp_dc_write_curves(const agp_dc_set* set, const agp_model* model,
                               const agp_corpus* corpus, const char* set_label, const char* path,
                               int append) {
  return guard([&] {
    const auto& c = deref(corpus, "corpus").corpus;
    const auto traces = agp::trace_corpus(deref(model, "model").model, c);
    std::vector<agp::AccuracyCurve> curves;
    for (const auto& dc : deref(set, "set").dcs) {
      const auto data = agp::extract_activations(traces, c, dc.component, agp::TimestepScope::pooled());
      curves.push_back(agp::accuracy_over_time(dc, data));
    }
    std::string text = agp::curves_csv(curves, deref(set_label, "set_label"));
    if (append) text = text.substr(text.find('\n') + 1);
    std::ofstream out(deref(path, "path"), append ? std::ios::binary | std::ios::app : std::ios::binary);
    if (!out) throw agp::IoError(std::string("cannot write '") + path + "'");
    out << text;
  });
}

// ---- generalization matrices

agp_status agp_tgm(const agp_model* model, const agp_corpus* train, const agp_corpus* test,
                   int component, int t_from, int t_to, const agp_dc_params* params,
                   agp_matrix** out) {
  return guard([&] {
    put(out, std::make_unique<agp_matrix>(agp_matrix{agp::temporal_generalization_matrix(
                 deref(model, "model").model, deref(train, "train").corpus,
                 deref(test, "test").corpus, component_from(component), t_from, t_to,
                 hyper_from(params))}));
  });
}

agp_status agp_sgm(const agp_model* model, const agp_corpus* train, const agp_corpus* test,
                   int timestep, const agp_dc_params* params, agp_matrix** out) {
  return guard([&] {
    put(out, std::make_unique<agp_matrix>(agp_matrix{agp::spatial_generalization_matrix(
                 deref(model, "model").model, deref(train, "train").corpus,
                 deref(test, "test").corpus, timestep, hyper_from(params))}));
  });
}

agp_status agp_tgm_fixture(agp_fixture kind, size_t n_train, size_t n_test, size_t dim,
                           int timesteps, const agp_dc_params* params, agp_matrix** out) {
  return guard([&] {
    const auto hyper = hyper_from(params);
    const auto enc = kind == AGP_FIXTURE_ONSET ? agp::SyntheticEncoding::Onset
                                               : agp::SyntheticEncoding::Constant;
    const auto train = agp::synthetic_timestep_datasets(enc, n_train, dim, timesteps, hyper.seed, 0);
    const auto test = agp::synthetic_timestep_datasets(enc, n_test, dim, timesteps, hyper.seed, n_train);
    put(out, std::make_unique<agp_matrix>(
                 agp_matrix{agp::generalization_matrix(agp::MatrixAxis::Temporal, train, test, hyper)}));
  });
}

size_t agp_matrix_rows(const agp_matrix* m) { return m ? m->matrix.rows() : 0; }
size_t agp_matrix_cols(const agp_matrix* m) { return m ? m->matrix.cols() : 0; }
double agp_matrix_at(const agp_matrix* m, size_t row, size_t col) {
  if (!m || row >= m->matrix.rows() || col >= m->matrix.cols()) return -1.0;
  return m->matrix.at(row, col);
}

agp_status agp_matrix_write(const agp_matrix* m, const char* prefix, const char* title) {
  return guard([&] {
    agp::HeatmapOptions opts;
    if (title) opts.title = title;
    agp::write_matrix(deref(m, "matrix").matrix, deref(prefix, "prefix"), opts);
  });
}

void agp_matrix_free(agp_matrix* m) { delete m; }

// ---- intervention

void agp_intervention_params_default(agp_intervention_params* params) {
  if (!params) return;
  const agp::InterventionConfig cfg;
  params->eta = cfg.eta;
  params->apply_at = cfg.apply_at;
  params->targets = 0;
  for (const auto& t : cfg.targets) params->targets |= 1u << t.index();
  params->error = AGP_ERROR_SQUARED;
  params->steps = cfg.steps;
}

agp_status agp_intervention_compare(const agp_model* model, const agp_corpus* testset,
                                    const agp_dc_set* dcs, const agp_intervention_params* params,
                                    const agp_dc_set* probes, agp_report** out) {
  return guard([&] {
    const auto& m = deref(model, "model").model;
    const auto cfg = config_from(params);
    cfg.validate();
    const auto selected = agp::select_intervention_dcs(deref(dcs, "dcs").dcs, cfg, m.dims().hidden);
    std::vector<agp::DiagnosticClassifier> probe_list;
    if (probes) probe_list = probes->dcs;
    put(out, std::make_unique<agp_report>(agp_report{agp::compare_intervention(
                 m, deref(testset, "testset").corpus, selected, cfg, probe_list)}));
  });
}

agp_status agp_report_accuracy(const agp_report* report, double* without, double* with) {
  return guard([&] {
    const auto& r = deref(report, "report").report;
    if (without) *without = r.plain_accuracy;
    if (with) *with = r.intervened_accuracy;
  });
}

agp_status agp_report_dlogp(const agp_report* report, double* mean_abs, double* max_abs) {
  return guard([&] {
    const auto& r = deref(report, "report").report;
    if (mean_abs) *mean_abs = r.mean_abs_dlogp;
    if (max_abs) *max_abs = r.max_abs_dlogp;
  });
}

agp_status agp_report_write(const agp_report* report, const agp_vocab* vocab, uint64_t seed,
                            const char* dir) {
  return guard([&] {
    const auto& r = deref(report, "report").report;
    const std::filesystem::path d(deref(dir, "dir"));
    agp::write_text((d / "intervention.csv").string(), agp::intervention_rows_csv(r));
    agp::write_text((d / "words.csv").string(), agp::intervention_words_csv(r, deref(vocab, "vocab").vocab));
    std::string curves = agp::curves_csv(r.plain_curves, "plain");
    const std::string steered = agp::curves_csv(r.intervened_curves, "intervened");
    curves += steered.substr(steered.find('\n') + 1);
    agp::write_text((d / "curves.csv").string(), curves);
    agp::write_text((d / "summary.json").string(), agp::intervention_summary_json(r, seed));
  });
}

void agp_report_free(agp_report* report) { delete report; }

}  // extern "C"
