// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#include "agp/intervention.hpp"

#include <algorithm>
#include <cmath>

#include "agp/error.hpp"

namespace agp {

std::string_view to_string(ErrorKind e) noexcept {
  return e == ErrorKind::Squared ? "squared" : "cross-entropy";
}

ErrorKind parse_error_kind(std::string_view s) {
  if (s == "squared") return ErrorKind::Squared;
  if (s == "cross-entropy") return ErrorKind::CrossEntropy;
  throw ParseError("error kind must be 'squared' or 'cross-entropy', got '" + std::string(s) + "'",
                   0, "error");
}

void InterventionConfig::validate() const {
  if (targets.empty()) throw Error("intervention needs at least one target");
  for (const auto& t : targets) {
    if (t.kind != Kind::H && t.kind != Kind::C) {
      throw Error("intervention target " + t.name() + " is a gate; only h and c can be steered");
    }
  }
  if (!std::isfinite(eta) || eta < 0) throw Error("eta must be finite and non-negative");
  if (steps < 1) throw Error("steps must be at least 1");
}

Vector intervention_gradient(const DiagnosticClassifier& dc, std::span<const double> a, Number gold,
                             ErrorKind error) {
  const double p = dc.predict(a);
  const double y = gold == Number::Plural ? 1.0 : 0.0;
  const double scale = error == ErrorKind::Squared ? -(y - p) * p * (1.0 - p) : -(y - p);
  Vector g(dc.w.size());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = scale * dc.w[j];
  return g;
}

std::vector<DiagnosticClassifier> select_intervention_dcs(const std::vector<DiagnosticClassifier>& dcs,
                                                          const InterventionConfig& cfg,
                                                          std::size_t hidden) {
  std::vector<DiagnosticClassifier> out;
  for (const auto& target : cfg.targets) {
    auto it = std::find_if(dcs.begin(), dcs.end(), [&](const DiagnosticClassifier& dc) {
      return dc.component == target && dc.scope == TimestepScope::at(cfg.apply_at);
    });
    if (it == dcs.end()) {
      throw Error("no DC for " + target.name() + " trained at t" + std::to_string(cfg.apply_at));
    }
    if (it->w.size() != hidden) {
      throw DimensionError("DC for " + target.name() + " has dim " + std::to_string(it->w.size()) +
                           ", model hidden size is " + std::to_string(hidden));
    }
    out.push_back(*it);
  }
  return out;
}

StepState intervene_state(const StepState& state, const std::vector<DiagnosticClassifier>& dcs,
                          Number gold, const InterventionConfig& cfg) {
  cfg.validate();
  if (dcs.size() != cfg.targets.size()) throw Error("one DC per intervention target required");
  StepState out = state;
  for (std::size_t ti = 0; ti < cfg.targets.size(); ++ti) {
    const ComponentId target = cfg.targets[ti];
    const DiagnosticClassifier& dc = dcs[ti];
    Vector& a = out.component(target);
    if (a.size() != dc.w.size()) {
      throw DimensionError("DC for " + target.name() + " has dim " + std::to_string(dc.w.size()) +
                           ", activation has " + std::to_string(a.size()));
    }
    for (int s = 0; s < cfg.steps; ++s) {
      const Vector g = intervention_gradient(dc, a, gold, cfg.error);
      for (std::size_t j = 0; j < a.size(); ++j) a[j] -= cfg.eta * g[j];
    }
  }
  return out;
}

InterventionRun run_with_intervention(const LstmLm& model, const AgreementSentence& s,
                                      const std::vector<DiagnosticClassifier>& dcs,
                                      const InterventionConfig& cfg) {
  cfg.validate();
  const int apply = s.subject_idx + cfg.apply_at;
  if (apply < 0 || apply >= s.length()) {
    throw Error("intervention timestep " + std::to_string(cfg.apply_at) + " outside the sentence");
  }
  InterventionRun run;
  StepState state = initial_state(model);
  for (int pos = 0; pos < s.length(); ++pos) {
    state = step(model, s.tokens[pos], state);
    run.trace.logits.push_back(output_logits(model, state));
    run.trace.steps.push_back(state);
    if (pos == apply) {
      StepState adjusted = intervene_state(state, dcs, s.number, cfg);
      for (std::size_t ti = 0; ti < cfg.targets.size(); ++ti) {
        run.pre_prob.push_back(dcs[ti].predict(state.component(cfg.targets[ti])));
        run.post_prob.push_back(dcs[ti].predict(adjusted.component(cfg.targets[ti])));
      }
      state = std::move(adjusted);
    }
  }
  run.prefers_correct = prefers_correct(run.trace.logits[static_cast<std::size_t>(s.verb_idx - 1)], s);
  return run;
}

InterventionReport compare_intervention(const LstmLm& model, const Corpus& testset,
                                        const std::vector<DiagnosticClassifier>& dcs,
                                        const InterventionConfig& cfg,
                                        const std::vector<DiagnosticClassifier>& probes) {
  if (testset.empty()) throw Error("compare_intervention: empty test set");
  cfg.validate();
  const int end_token = kEndToken;
  InterventionReport report;
  report.config = cfg;
  std::vector<ActivationTrace> plain_traces, steered_traces;
  std::size_t plain_hits = 0, steered_hits = 0, compared = 0;
  double sum_abs = 0, plain_lp = 0, steered_lp = 0;
  std::size_t total_tokens = 0;

  for (std::size_t si = 0; si < testset.size(); ++si) {
    const AgreementSentence& s = testset[si];
    ActivationTrace plain = forward(model, s.tokens);
    InterventionRun steered = run_with_intervention(model, s, dcs, cfg);

    InterventionRow row;
    row.sentence_id = si;
    row.number = s.number;
    row.pre_prob = steered.pre_prob;
    row.post_prob = steered.post_prob;
    const auto before_verb = static_cast<std::size_t>(s.verb_idx - 1);
    row.plain_correct = prefers_correct(plain.logits[before_verb], s);
    row.intervened_correct = steered.prefers_correct;
    auto logp = [](const Vector& logits, int tok) {
      return logits[static_cast<std::size_t>(tok)] - log_sum_exp(logits);
    };
    row.plain_logp_correct = logp(plain.logits[before_verb], s.correct_verb);
    row.plain_logp_incorrect = logp(plain.logits[before_verb], s.incorrect_verb);
    row.intervened_logp_correct = logp(steered.trace.logits[before_verb], s.correct_verb);
    row.intervened_logp_incorrect = logp(steered.trace.logits[before_verb], s.incorrect_verb);

    const Vector lp_plain = word_log_probs(model, plain, s.tokens, end_token);
    const Vector lp_steered = word_log_probs(model, steered.trace, s.tokens, end_token);
    const auto first_affected = static_cast<std::size_t>(s.subject_idx + cfg.apply_at + 1);
    for (std::size_t t = 0; t < lp_plain.size(); ++t) {
      const std::size_t predicted = t + 1;
      const int token = predicted < s.tokens.size() ? s.tokens[predicted] : end_token;
      report.words.push_back(WordLogProb{si, predicted, token, lp_plain[t], lp_steered[t]});
      plain_lp += lp_plain[t];
      steered_lp += lp_steered[t];
      if (t >= first_affected && t != before_verb) {
        const double d = std::abs(lp_steered[t] - lp_plain[t]);
        row.sum_abs_dlogp += d;
        row.max_abs_dlogp = std::max(row.max_abs_dlogp, d);
        ++row.compared_tokens;
      }
    }
    total_tokens += lp_plain.size();
    plain_hits += row.plain_correct ? 1 : 0;
    steered_hits += row.intervened_correct ? 1 : 0;
    sum_abs += row.sum_abs_dlogp;
    compared += row.compared_tokens;
    report.max_abs_dlogp = std::max(report.max_abs_dlogp, row.max_abs_dlogp);
    report.rows.push_back(std::move(row));
    if (!probes.empty()) {
      plain_traces.push_back(std::move(plain));
      steered_traces.push_back(std::move(steered.trace));
    }
  }
  const double n = static_cast<double>(testset.size());
  report.plain_accuracy = static_cast<double>(plain_hits) / n;
  report.intervened_accuracy = static_cast<double>(steered_hits) / n;
  report.mean_abs_dlogp = compared ? sum_abs / static_cast<double>(compared) : 0.0;
  report.plain_perplexity = std::exp(-plain_lp / static_cast<double>(total_tokens));
  report.intervened_perplexity = std::exp(-steered_lp / static_cast<double>(total_tokens));

  for (const auto& probe : probes) {
    const auto plain_d = extract_activations(plain_traces, testset, probe.component, TimestepScope::pooled());
    const auto steered_d =
        extract_activations(steered_traces, testset, probe.component, TimestepScope::pooled());
    report.plain_curves.push_back(accuracy_over_time(probe, plain_d));
    report.intervened_curves.push_back(accuracy_over_time(probe, steered_d));
  }
  return report;
}

}  // namespace agp
