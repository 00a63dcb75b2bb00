// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "agp/diagnostic.hpp"
#include "agp/lstm.hpp"

namespace agp {

enum class ErrorKind { Squared, CrossEntropy };

std::string_view to_string(ErrorKind e) noexcept;
ErrorKind parse_error_kind(std::string_view s);

// Steering of h and c toward the gold number. The gold label always comes
// from the corpus annotation, so this is an analysis tool rather than a
// decoder improvement.
struct InterventionConfig {
  double eta = 0.5;
  int apply_at = 0;  // relative to the subject
  std::vector<ComponentId> targets{{0, Kind::H}, {0, Kind::C}, {1, Kind::H}, {1, Kind::C}};
  ErrorKind error = ErrorKind::Squared;
  int steps = 1;

  // Throws Error for empty targets, gate targets, non-finite or negative eta,
  // or steps < 1.
  void validate() const;
};

// dE/da for one DC. Squared: E = (y - p)^2 / 2 gives -(y - p) p (1 - p) w.
// Cross-entropy gives -(y - p) w.
Vector intervention_gradient(const DiagnosticClassifier& dc, std::span<const double> a, Number gold,
                             ErrorKind error);

// For each target, the DC with that component and scope at(cfg.apply_at).
// Throws Error when one is missing or has the wrong dimension.
std::vector<DiagnosticClassifier> select_intervention_dcs(const std::vector<DiagnosticClassifier>& dcs,
                                                          const InterventionConfig& cfg,
                                                          std::size_t hidden);

// a <- a - eta dE/da, repeated cfg.steps times, for every target
// independently. dcs[i] belongs to cfg.targets[i]. Gates are not touched.
StepState intervene_state(const StepState& state, const std::vector<DiagnosticClassifier>& dcs,
                          Number gold, const InterventionConfig& cfg);

struct InterventionRun {
  // Entry apply position holds the unadjusted state and its logits; the
  // adjusted state feeds the following step.
  ActivationTrace trace;
  bool prefers_correct = false;
  std::vector<double> pre_prob;   // DC P(Plural) per target before the update
  std::vector<double> post_prob;  // and after
};

InterventionRun run_with_intervention(const LstmLm& model, const AgreementSentence& s,
                                      const std::vector<DiagnosticClassifier>& dcs,
                                      const InterventionConfig& cfg);

struct InterventionRow {
  std::size_t sentence_id = 0;
  Number number = Number::Singular;
  std::vector<double> pre_prob;
  std::vector<double> post_prob;
  bool plain_correct = false;
  bool intervened_correct = false;
  double plain_logp_correct = 0, plain_logp_incorrect = 0;
  double intervened_logp_correct = 0, intervened_logp_incorrect = 0;
  // Over predicted tokens after the adjusted state, excluding the verb.
  double sum_abs_dlogp = 0;
  double max_abs_dlogp = 0;
  std::size_t compared_tokens = 0;
};

struct WordLogProb {
  std::size_t sentence_id = 0;
  std::size_t position = 0;  // index of the predicted token; length means end token
  int token = 0;
  double plain = 0;
  double intervened = 0;
};

struct InterventionReport {
  InterventionConfig config;
  std::vector<InterventionRow> rows;
  std::vector<WordLogProb> words;
  double plain_accuracy = 0;
  double intervened_accuracy = 0;
  double mean_abs_dlogp = 0;
  double max_abs_dlogp = 0;
  double plain_perplexity = 0;
  double intervened_perplexity = 0;
  std::vector<AccuracyCurve> plain_curves;
  std::vector<AccuracyCurve> intervened_curves;
};

// Runs every sentence plain and intervened. probes, when non-empty, are
// evaluated over time on both sets of traces.
InterventionReport compare_intervention(const LstmLm& model, const Corpus& testset,
                                        const std::vector<DiagnosticClassifier>& dcs,
                                        const InterventionConfig& cfg,
                                        const std::vector<DiagnosticClassifier>& probes = {});

}  // namespace agp
