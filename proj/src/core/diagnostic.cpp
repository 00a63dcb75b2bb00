// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#include "agp/diagnostic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "agp/error.hpp"

namespace agp {

// ---------------------------------------------------------------------------
// Scopes

std::string TimestepScope::format() const {
  switch (kind) {
    case Kind::Pooled: return "pooled";
    case Kind::At: return "t" + std::to_string(from);
    case Kind::Range: return "t" + std::to_string(from) + ".." + std::to_string(to);
  }
  return "pooled";
}

namespace {

int parse_int_field(std::string_view text, const std::string& field) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("field '" + field + "': not an integer: '" + std::string(text) + "'", 0, field);
  }
  return v;
}

double parse_double_field(std::string_view text, const std::string& field) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("field '" + field + "': not a number: '" + std::string(text) + "'", 0, field);
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

TimestepScope TimestepScope::parse(std::string_view s) {
  if (s == "pooled") return pooled();
  if (s.size() < 2 || s[0] != 't') {
    throw ParseError("invalid scope '" + std::string(s) + "' (expected pooled, t<n> or t<a>..<b>)",
                     0, "scope");
  }
  s.remove_prefix(1);
  const auto dots = s.find("..");
  if (dots == std::string_view::npos) return at(parse_int_field(s, "scope"));
  const int a = parse_int_field(s.substr(0, dots), "scope");
  const int b = parse_int_field(s.substr(dots + 2), "scope");
  if (b < a) throw ParseError("scope range is empty", 0, "scope");
  return range(a, b);
}

// ---------------------------------------------------------------------------
// Activation extraction

std::size_t ActivationDataset::count(Number n) const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [n](const ActivationRecord& r) { return r.label == n; }));
}

std::vector<ActivationTrace> trace_corpus(const LstmLm& model, const Corpus& corpus) {
  std::vector<ActivationTrace> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(forward(model, s.tokens));
  return out;
}

ActivationDataset extract_activations(const std::vector<ActivationTrace>& traces,
                                      const Corpus& corpus, ComponentId component,
                                      TimestepScope scope, std::size_t id_base) {
  if (traces.size() != corpus.size()) throw DimensionError("one trace per sentence required");
  ActivationDataset d{component, scope, {}};
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    const AgreementSentence& s = corpus[si];
    const ActivationTrace& tr = traces[si];
    if (tr.size() != s.tokens.size()) throw DimensionError("trace length differs from sentence");
    int lo = -s.subject_idx;
    int hi = s.length() - 1 - s.subject_idx;
    if (scope.kind != TimestepScope::Kind::Pooled) {
      if (scope.from < lo || scope.to > hi) {
        throw Error("sentence " + std::to_string(id_base + si) + " has relative timesteps " +
                    std::to_string(lo) + ".." + std::to_string(hi) + ", scope " + scope.format() +
                    " falls outside them");
      }
      lo = scope.from;
      hi = scope.to;
    }
    for (int t = lo; t <= hi; ++t) {
      const auto pos = static_cast<std::size_t>(s.subject_idx + t);
      d.records.push_back(
          ActivationRecord{tr.steps[pos].component(component), s.number, t, component, id_base + si});
    }
  }
  return d;
}

ActivationDataset extract_activations(const LstmLm& model, const Corpus& corpus,
                                      ComponentId component, TimestepScope scope) {
  return extract_activations(trace_corpus(model, corpus), corpus, component, scope);
}

ActivationDataset select_timestep(const ActivationDataset& d, int timestep) {
  ActivationDataset out{d.component, TimestepScope::at(timestep), {}};
  for (const auto& r : d.records) {
    if (r.timestep == timestep) out.records.push_back(r);
  }
  return out;
}

CorrectWrongSplit split_correct_wrong(const LstmLm& model, const Corpus& corpus) {
  CorrectWrongSplit out;
  for (const auto& s : corpus) {
    (agreement_prefers_correct(model, s) ? out.correct : out.wrong).push_back(s);
  }
  if (out.correct.size() < CorrectWrongSplit::kMinimumPerSide) {
    out.warnings.push_back("correct set has only " + std::to_string(out.correct.size()) +
                           " sentences (minimum 50)");
  }
  if (out.wrong.size() < CorrectWrongSplit::kMinimumPerSide) {
    out.warnings.push_back("wrong set has only " + std::to_string(out.wrong.size()) +
                           " sentences (minimum 50)");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Diagnostic classifiers

double DiagnosticClassifier::predict(std::span<const double> x) const {
  if (x.size() != w.size()) {
    throw DimensionError("DC for " + component.name() + " expects dim " + std::to_string(w.size()) +
                         ", got " + std::to_string(x.size()));
  }
  return sigmoid(dot(w, x) + b);
}

Number DiagnosticClassifier::classify(std::span<const double> x) const {
  return predict(x) > 0.5 ? Number::Plural : Number::Singular;
}

double dc_predict(const DiagnosticClassifier& dc, std::span<const double> x) { return dc.predict(x); }

double dc_objective(std::span<const double> w, double b,
                    const std::vector<const ActivationRecord*>& records, double l2, Vector* grad_w,
                    double* grad_b) {
  if (records.empty()) throw Error("dc_objective: no records");
  const std::size_t dim = w.size();
  if (grad_w) grad_w->assign(dim, 0.0);
  double gb = 0.0;
  double loss = 0.0;
  for (const ActivationRecord* r : records) {
    if (r->vector.size() != dim) throw DimensionError("record dim differs from classifier dim");
    const double z = dot(w, r->vector) + b;
    const double y = r->label == Number::Plural ? 1.0 : 0.0;
    // -[y log s(z) + (1-y) log(1-s(z))] = log(1+e^z) - y z, computed stably
    loss += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - y * z;
    if (grad_w) {
      const double e = sigmoid(z) - y;
      for (std::size_t j = 0; j < dim; ++j) (*grad_w)[j] += e * r->vector[j];
      gb += e;
    }
  }
  const double inv = 1.0 / static_cast<double>(records.size());
  double penalty = 0.0;
  for (double v : w) penalty += v * v;
  loss = loss * inv + 0.5 * l2 * penalty;
  if (grad_w) {
    for (std::size_t j = 0; j < dim; ++j) (*grad_w)[j] = (*grad_w)[j] * inv + l2 * w[j];
  }
  if (grad_b) *grad_b = gb * inv;
  return loss;
}

std::vector<const ActivationRecord*> balanced_records(const ActivationDataset& d, std::uint64_t seed) {
  std::vector<std::size_t> sg, pl;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    (d.records[i].label == Number::Singular ? sg : pl).push_back(i);
  }
  auto& major = sg.size() > pl.size() ? sg : pl;
  const std::size_t keep = std::min(sg.size(), pl.size());
  if (major.size() > keep) {
    Rng rng(seed);
    rng.shuffle(major);
    major.resize(keep);
  }
  std::vector<std::size_t> idx(sg);
  idx.insert(idx.end(), pl.begin(), pl.end());
  std::sort(idx.begin(), idx.end());
  std::vector<const ActivationRecord*> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(&d.records[i]);
  return out;
}

DiagnosticClassifier train_dc(const ActivationDataset& dataset, const DcHyper& hyper) {
  if (dataset.count(Number::Singular) == 0 || dataset.count(Number::Plural) == 0) {
    throw Error("train_dc: dataset for " + dataset.component.name() + " " +
                dataset.scope.format() + " contains a single class");
  }
  if (hyper.epochs < 0) throw Error("train_dc: epochs must be non-negative");
  const auto records = balanced_records(dataset, derive_seed(hyper.seed, "dc-balance"));
  DiagnosticClassifier dc;
  dc.w.assign(dataset.dim(), 0.0);
  dc.component = dataset.component;
  dc.scope = dataset.scope;
  dc.hyper = hyper;
  Vector gw;
  double gb = 0.0;
  dc.loss_history.push_back(dc_objective(dc.w, dc.b, records, hyper.l2, &gw, &gb));
  for (int e = 0; e < hyper.epochs; ++e) {
    for (std::size_t j = 0; j < dc.w.size(); ++j) dc.w[j] -= hyper.lr * gw[j];
    dc.b -= hyper.lr * gb;
    dc.loss_history.push_back(dc_objective(dc.w, dc.b, records, hyper.l2, &gw, &gb));
  }
  if (!all_finite(dc.w) || !std::isfinite(dc.b)) throw NumericError("train_dc diverged");
  return dc;
}

DcScore dc_score(const DiagnosticClassifier& dc, const ActivationDataset& dataset) {
  DcScore s;
  for (const auto& r : dataset.records) {
    s.correct += dc.classify(r.vector) == r.label ? 1 : 0;
    ++s.total;
  }
  return s;
}

double dc_accuracy(const DiagnosticClassifier& dc, const ActivationDataset& dataset) {
  if (dataset.records.empty()) throw Error("dc_accuracy: empty dataset");
  return dc_score(dc, dataset).accuracy();
}

ActivationDataset shuffle_labels(const ActivationDataset& d, Rng& rng) {
  // The label is a property of the sentence, so permute it across
  // sentences and keep every record of one sentence on the same label.
  std::map<std::size_t, Number> by_sentence;
  for (const auto& r : d.records) by_sentence.emplace(r.sentence_id, r.label);
  std::vector<Number> labels;
  labels.reserve(by_sentence.size());
  for (const auto& [id, label] : by_sentence) labels.push_back(label);
  rng.shuffle(labels);
  std::size_t i = 0;
  for (auto& [id, label] : by_sentence) label = labels[i++];
  ActivationDataset out = d;
  for (auto& r : out.records) r.label = by_sentence.at(r.sentence_id);
  return out;
}

AccuracyCurve accuracy_over_time(const DiagnosticClassifier& dc, const ActivationDataset& test) {
  std::map<int, DcScore> by_t;
  for (const auto& r : test.records) {
    DcScore& s = by_t[r.timestep];
    s.correct += dc.classify(r.vector) == r.label ? 1 : 0;
    ++s.total;
  }
  AccuracyCurve curve{dc.component, {}, {}, {}};
  for (const auto& [t, s] : by_t) {
    curve.timesteps.push_back(t);
    curve.accuracy.push_back(s.accuracy());
    curve.counts.push_back(s.total);
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Generalization matrices

GeneralizationMatrix generalization_matrix(MatrixAxis axis, const std::vector<LabeledDataset>& train,
                                           const std::vector<LabeledDataset>& test,
                                           const DcHyper& hyper) {
  GeneralizationMatrix gm;
  gm.axis = axis;
  for (const auto& t : train) gm.row_labels.push_back(t.label);
  for (const auto& t : test) gm.col_labels.push_back(t.label);
  gm.accuracy.assign(train.size() * test.size(), 0.0);
  gm.counts.assign(train.size() * test.size(), 0);
  for (std::size_t r = 0; r < train.size(); ++r) {
    DcHyper h = hyper;
    h.seed = derive_seed(hyper.seed, "gm-row", r);
    const DiagnosticClassifier dc = train_dc(train[r].data, h);
    for (std::size_t c = 0; c < test.size(); ++c) {
      if (test[c].data.records.empty()) {
        throw Error("generalization_matrix: empty test set for column " + test[c].label);
      }
      const DcScore s = dc_score(dc, test[c].data);
      gm.accuracy[r * test.size() + c] = s.accuracy();
      gm.counts[r * test.size() + c] = s.total;
    }
  }
  return gm;
}

void require_disjoint(const Corpus& train, const Corpus& test) {
  std::set<std::vector<int>> seen;
  for (const auto& s : train) seen.insert(s.tokens);
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (seen.count(test[i].tokens)) {
      throw Error("test sentence " + std::to_string(i) + " also occurs in the training corpus");
    }
  }
}

GeneralizationMatrix temporal_generalization_matrix(const LstmLm& model, const Corpus& train,
                                                    const Corpus& test, ComponentId component,
                                                    int t_from, int t_to, const DcHyper& hyper) {
  if (t_to < t_from) throw Error("temporal_generalization_matrix: empty timestep range");
  require_disjoint(train, test);
  const auto train_traces = trace_corpus(model, train);
  const auto test_traces = trace_corpus(model, test);
  const auto scope = TimestepScope::range(t_from, t_to);
  const ActivationDataset train_all = extract_activations(train_traces, train, component, scope);
  const ActivationDataset test_all =
      extract_activations(test_traces, test, component, scope, train.size());
  std::vector<LabeledDataset> rows, cols;
  for (int t = t_from; t <= t_to; ++t) {
    const std::string label = "t" + std::to_string(t);
    rows.push_back({label, select_timestep(train_all, t)});
    cols.push_back({label, select_timestep(test_all, t)});
  }
  return generalization_matrix(MatrixAxis::Temporal, rows, cols, hyper);
}

GeneralizationMatrix spatial_generalization_matrix(const LstmLm& model, const Corpus& train,
                                                   const Corpus& test, int timestep,
                                                   const DcHyper& hyper) {
  require_disjoint(train, test);
  const auto train_traces = trace_corpus(model, train);
  const auto test_traces = trace_corpus(model, test);
  const auto scope = TimestepScope::at(timestep);
  std::vector<LabeledDataset> rows, cols;
  for (ComponentId id : ComponentId::all()) {
    if (static_cast<std::size_t>(id.layer) >= model.layers.size()) continue;
    rows.push_back({id.name(), extract_activations(train_traces, train, id, scope)});
    cols.push_back({id.name(), extract_activations(test_traces, test, id, scope, train.size())});
  }
  return generalization_matrix(MatrixAxis::Spatial, rows, cols, hyper);
}

std::vector<LabeledDataset> synthetic_timestep_datasets(SyntheticEncoding encoding, std::size_t n,
                                                        std::size_t dim, int timesteps,
                                                        std::uint64_t seed, std::size_t id_base) {
  if (dim == 0 || timesteps <= 0) throw Error("synthetic fixture needs dim > 0 and timesteps > 0");
  Rng dir_rng(derive_seed(seed, "fixture-direction"));
  Vector direction(dim);
  double norm = 0.0;
  for (double& v : direction) {
    v = dir_rng.normal();
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (double& v : direction) v *= 3.0 / norm;

  Rng rng(derive_seed(seed, "fixture-noise", id_base));
  const ComponentId component{0, Kind::H};
  std::vector<LabeledDataset> out;
  for (int t = 0; t < timesteps; ++t) {
    out.push_back({"t" + std::to_string(t), ActivationDataset{component, TimestepScope::at(t), {}}});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Number label = i % 2 == 0 ? Number::Singular : Number::Plural;
    const double sign = label == Number::Plural ? 1.0 : -1.0;
    for (int t = 0; t < timesteps; ++t) {
      Vector x(dim);
      const bool encoded = encoding == SyntheticEncoding::Constant || t == 0;
      for (std::size_t j = 0; j < dim; ++j) x[j] = rng.normal() + (encoded ? sign * direction[j] : 0.0);
      out[static_cast<std::size_t>(t)].data.records.push_back(
          ActivationRecord{std::move(x), label, t, component, id_base + i});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string format_dcs(const std::vector<DiagnosticClassifier>& dcs) {
  std::string out;
  for (std::size_t i = 0; i < dcs.size(); ++i) {
    const auto& dc = dcs[i];
    if (i) out += "---\n";
    out += "component = " + dc.component.name() + "\n";
    out += "scope = " + dc.scope.format() + "\n";
    out += "dim = " + std::to_string(dc.w.size()) + "\n";
    out += "bias = " + format_double(dc.b) + "\n";
    out += "weights =";
    for (double v : dc.w) out += " " + format_double(v);
    out += "\n";
    out += "lr = " + format_double(dc.hyper.lr) + "\n";
    out += "epochs = " + std::to_string(dc.hyper.epochs) + "\n";
    out += "l2 = " + format_double(dc.hyper.l2) + "\n";
    out += "seed = " + std::to_string(dc.hyper.seed) + "\n";
  }
  return out;
}

std::vector<DiagnosticClassifier> parse_dcs(std::string_view text) {
  std::vector<DiagnosticClassifier> out;
  std::map<std::string, std::string> fields;
  std::size_t line_no = 0, doc_start = 1;

  auto finish = [&]() {
    if (fields.empty()) return;
    auto need = [&](const std::string& key) -> const std::string& {
      auto it = fields.find(key);
      if (it == fields.end()) {
        throw ParseError("DC document starting at line " + std::to_string(doc_start) +
                             " lacks '" + key + "'",
                         doc_start, key);
      }
      return it->second;
    };
    DiagnosticClassifier dc;
    try {
      dc.component = ComponentId::parse(need("component"));
      dc.scope = TimestepScope::parse(need("scope"));
      const int dim = parse_int_field(need("dim"), "dim");
      dc.b = parse_double_field(need("bias"), "bias");
      std::istringstream ws(need("weights"));
      for (std::string tok; ws >> tok;) dc.w.push_back(parse_double_field(tok, "weights"));
      if (dim < 0 || dc.w.size() != static_cast<std::size_t>(dim)) {
        throw ParseError("weights count differs from dim", doc_start, "weights");
      }
      dc.hyper.lr = parse_double_field(need("lr"), "lr");
      dc.hyper.epochs = parse_int_field(need("epochs"), "epochs");
      dc.hyper.l2 = parse_double_field(need("l2"), "l2");
      const std::string& seed = need("seed");
      auto [p, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), dc.hyper.seed);
      if (ec != std::errc() || p != seed.data() + seed.size()) {
        throw ParseError("seed is not an unsigned integer", doc_start, "seed");
      }
    } catch (const ParseError& e) {
      throw ParseError("DC document at line " + std::to_string(doc_start) + ": " + e.what(),
                       doc_start, e.field());
    }
    if (!all_finite(dc.w) || !std::isfinite(dc.b)) {
      throw ParseError("non-finite DC parameters", doc_start, "weights");
    }
    out.push_back(std::move(dc));
    fields.clear();
  };

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "---") {
      finish();
      doc_start = line_no + 1;
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(line_no) + ": expected key = value", line_no, "line");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (fields.empty()) doc_start = line_no;
    fields[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  finish();
  return out;
}

void save_dcs(const std::vector<DiagnosticClassifier>& dcs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << format_dcs(dcs);
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<DiagnosticClassifier> load_dcs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dcs(ss.str());
}

}  // namespace agp
