// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "agp/corpus.hpp"
#include "agp/lstm.hpp"

namespace agp {

// Which positions of a sentence a dataset draws from. Timesteps are relative
// to the subject: the subject is 0, the token before it -1.
struct TimestepScope {
  enum class Kind { Pooled, At, Range };
  Kind kind = Kind::Pooled;
  int from = 0;
  int to = 0;

  static TimestepScope pooled() { return {}; }
  static TimestepScope at(int t) { return {Kind::At, t, t}; }
  static TimestepScope range(int from, int to) { return {Kind::Range, from, to}; }

  // "pooled", "t3", "t-1", "t0..6"
  std::string format() const;
  static TimestepScope parse(std::string_view s);

  bool operator==(const TimestepScope&) const = default;
};

struct ActivationRecord {
  Vector vector;
  Number label = Number::Singular;
  int timestep = 0;
  ComponentId component;
  std::size_t sentence_id = 0;
};

struct ActivationDataset {
  ComponentId component;
  TimestepScope scope;
  std::vector<ActivationRecord> records;

  std::size_t count(Number n) const;
  std::size_t dim() const { return records.empty() ? 0 : records.front().vector.size(); }
};

std::vector<ActivationTrace> trace_corpus(const LstmLm& model, const Corpus& corpus);

// Sentence ids are id_base + index in corpus. Throws Error naming the
// sentence when the scope asks for a position the sentence does not have.
ActivationDataset extract_activations(const std::vector<ActivationTrace>& traces,
                                      const Corpus& corpus, ComponentId component,
                                      TimestepScope scope, std::size_t id_base = 0);
ActivationDataset extract_activations(const LstmLm& model, const Corpus& corpus,
                                      ComponentId component, TimestepScope scope);

// Keeps only the records at one relative timestep.
ActivationDataset select_timestep(const ActivationDataset& d, int timestep);

struct CorrectWrongSplit {
  static constexpr std::size_t kMinimumPerSide = 50;
  Corpus correct;
  Corpus wrong;
  std::vector<std::string> warnings;
};

CorrectWrongSplit split_correct_wrong(const LstmLm& model, const Corpus& corpus);

struct DcHyper {
  double lr = 0.1;
  int epochs = 200;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

// Logistic probe: P(Plural | x) = sigmoid(w.x + b).
struct DiagnosticClassifier {
  Vector w;
  double b = 0.0;
  ComponentId component;
  TimestepScope scope;
  DcHyper hyper;
  std::vector<double> loss_history;  // objective before training and after each epoch

  double predict(std::span<const double> x) const;
  // Exactly 0.5 is Singular.
  Number classify(std::span<const double> x) const;
};

// Mean cross-entropy plus (l2/2)|w|^2 over the records; writes the gradient
// when grad_w/grad_b are non-null.
double dc_objective(std::span<const double> w, double b,
                    const std::vector<const ActivationRecord*>& records, double l2,
                    Vector* grad_w = nullptr, double* grad_b = nullptr);

// Records kept after downsampling the majority label, in input order.
std::vector<const ActivationRecord*> balanced_records(const ActivationDataset& d,
                                                      std::uint64_t seed);

// Full-batch gradient descent from w = 0, b = 0 on the class-balanced
// dataset. Throws Error when only one label is present.
DiagnosticClassifier train_dc(const ActivationDataset& dataset, const DcHyper& hyper);

double dc_predict(const DiagnosticClassifier& dc, std::span<const double> x);

struct DcScore {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

DcScore dc_score(const DiagnosticClassifier& dc, const ActivationDataset& dataset);
double dc_accuracy(const DiagnosticClassifier& dc, const ActivationDataset& dataset);

// Permutation null: labels permuted across sentences, records of one
// sentence keep a shared label.
ActivationDataset shuffle_labels(const ActivationDataset& d, Rng& rng);

struct AccuracyCurve {
  ComponentId component;
  std::vector<int> timesteps;
  std::vector<double> accuracy;
  std::vector<std::size_t> counts;
};

// Accuracy of dc on the records of each timestep present in test.
AccuracyCurve accuracy_over_time(const DiagnosticClassifier& dc, const ActivationDataset& test);

enum class MatrixAxis { Temporal, Spatial };

struct GeneralizationMatrix {
  MatrixAxis axis = MatrixAxis::Temporal;
  std::vector<std::string> row_labels;  // train key
  std::vector<std::string> col_labels;  // test key
  std::vector<double> accuracy;         // row-major
  std::vector<std::size_t> counts;      // test records per cell

  std::size_t rows() const noexcept { return row_labels.size(); }
  std::size_t cols() const noexcept { return col_labels.size(); }
  double at(std::size_t r, std::size_t c) const { return accuracy.at(r * cols() + c); }
  std::size_t count_at(std::size_t r, std::size_t c) const { return counts.at(r * cols() + c); }
};

struct LabeledDataset {
  std::string label;
  ActivationDataset data;
};

// Cell (r, c): accuracy on test[c] of a DC trained on train[r]. The DC of
// row r is seeded with derive_seed(hyper.seed, "gm-row", r).
GeneralizationMatrix generalization_matrix(MatrixAxis axis, const std::vector<LabeledDataset>& train,
                                           const std::vector<LabeledDataset>& test,
                                           const DcHyper& hyper);

// Throws Error when a test sentence also occurs in the training corpus.
void require_disjoint(const Corpus& train, const Corpus& test);

// Rows and columns are relative timesteps t_from..t_to of one component.
GeneralizationMatrix temporal_generalization_matrix(const LstmLm& model, const Corpus& train,
                                                    const Corpus& test, ComponentId component,
                                                    int t_from, int t_to, const DcHyper& hyper);

// Rows and columns are components, all at the same relative timestep.
GeneralizationMatrix spatial_generalization_matrix(const LstmLm& model, const Corpus& train,
                                                   const Corpus& test, int timestep,
                                                   const DcHyper& hyper);

enum class SyntheticEncoding {
  Constant,  // same label direction at every timestep
  Onset,     // label direction at timestep 0 only, noise elsewhere
};

// Synthetic per-timestep datasets (labels "t0".."t<T-1>") for exercising
// the matrix machinery without a model: n sentences with alternating labels,
// unit Gaussian noise, and a label-signed offset of norm 3 along a fixed
// random direction where the label is encoded.
std::vector<LabeledDataset> synthetic_timestep_datasets(SyntheticEncoding encoding, std::size_t n,
                                                        std::size_t dim, int timesteps,
                                                        std::uint64_t seed,
                                                        std::size_t id_base = 0);

// Text key-value documents, one per classifier, separated by "---" lines:
//   component = c1
//   scope = t0
//   dim = 64
//   bias = ...
//   weights = w_0 w_1 ...
//   lr = 0.1
//   epochs = 200
//   l2 = 0.0001
//   seed = 7
std::string format_dcs(const std::vector<DiagnosticClassifier>& dcs);
std::vector<DiagnosticClassifier> parse_dcs(std::string_view text);
void save_dcs(const std::vector<DiagnosticClassifier>& dcs, const std::string& path);
std::vector<DiagnosticClassifier> load_dcs(const std::string& path);

}  // namespace agp
