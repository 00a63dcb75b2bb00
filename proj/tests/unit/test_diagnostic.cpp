// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "agp/corpus.hpp"
#include "agp/diagnostic.hpp"
#include "agp/error.hpp"

using namespace agp;

namespace {

const Vocab& V() { return Vocab::builtin(); }

LstmLm small_model() { return LstmLm::initialized({V().size(), 16, 16, 2}, 21); }

Corpus corpus(const char* spec, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return generate_corpus(ConstraintSpec::parse(spec), n, V(), rng);
}

// Two Gaussian clusters at +-offset along the first axis.
ActivationDataset clusters(std::size_t n, double offset, std::uint64_t seed, std::size_t id_base = 0) {
  Rng rng(seed);
  ActivationDataset d{ComponentId{1, Kind::H}, TimestepScope::at(0), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const Number label = i % 2 ? Number::Plural : Number::Singular;
    Vector x(5);
    for (auto& v : x) v = 0.3 * rng.normal();
    x[0] += label == Number::Plural ? offset : -offset;
    d.records.push_back({x, label, 0, d.component, id_base + i});
  }
  return d;
}

}  // namespace

TEST_CASE("timestep scopes") {
  for (const char* s : {"pooled", "t0", "t3", "t-1", "t0..6", "t-2..4"}) {
    CHECK(TimestepScope::parse(s).format() == s);
  }
  CHECK(TimestepScope::parse("t4") == TimestepScope::at(4));
  CHECK_THROWS(TimestepScope::parse("t"));
  CHECK_THROWS(TimestepScope::parse("t5..2"));
  CHECK_THROWS(TimestepScope::parse("everything"));
}

TEST_CASE("pooled extraction counts") {
  const LstmLm m = small_model();
  const Corpus c = corpus("WD-K2-L4-M1-A-", 1, 1);
  const auto n = c.front().tokens.size();
  std::size_t total = 0;
  for (const auto& id : ComponentId::all()) {
    const auto d = extract_activations(m, c, id, TimestepScope::pooled());
    CHECK(d.records.size() == n);
    CHECK(d.records.front().timestep == -2);
    total += d.records.size();
  }
  CHECK(total == 10 * n);
}

TEST_CASE("per-timestep records come from the subject position") {
  const LstmLm m = small_model();
  const Corpus c = corpus("WD-K*-L5-M*-A3", 30, 2);
  const auto traces = trace_corpus(m, c);
  const ComponentId id{1, Kind::C};
  const auto d = extract_activations(traces, c, id, TimestepScope::at(0));
  REQUIRE(d.records.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(d.records[i].vector == traces[i].steps[static_cast<std::size_t>(c[i].subject_idx)].component(id));
    CHECK(d.records[i].label == c[i].number);
    CHECK(d.records[i].sentence_id == i);
  }
  const auto range = extract_activations(traces, c, id, TimestepScope::range(0, 6));
  CHECK(range.records.size() == 7 * c.size());
  CHECK(select_timestep(range, 3).records.size() == c.size());
}

TEST_CASE("scope outside a sentence names it") {
  const LstmLm m = small_model();
  const Corpus c = corpus("WD-K0-L2-M0-A-", 3, 3);
  try {
    extract_activations(m, c, ComponentId{0, Kind::H}, TimestepScope::at(5));
    FAIL("accepted out-of-range scope");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("sentence 0") != std::string::npos);
  }
}

TEST_CASE("correct/wrong split is a partition") {
  const LstmLm m = small_model();
  const Corpus c = corpus("WD-K*-L*-M*-A*", 120, 4);
  const auto split = split_correct_wrong(m, c);
  CHECK(split.correct.size() + split.wrong.size() == c.size());
  std::multiset<std::vector<int>> all, parts;
  for (const auto& s : c) all.insert(s.tokens);
  for (const auto& s : split.correct) parts.insert(s.tokens);
  for (const auto& s : split.wrong) parts.insert(s.tokens);
  CHECK(all == parts);
  const auto outcomes = agreement_accuracy(m, c).outcomes;
  std::size_t right = 0;
  for (bool b : outcomes) right += b;
  CHECK(split.correct.size() == right);
}

TEST_CASE("rigged always-correct model leaves the wrong set empty") {
  LstmLm m({V().size(), 16, 16, 2});
  const Corpus c = corpus("WD-K0-L3-M0-A-", 40, 5);
  // boost exactly the verbs each sentence needs: only one number is used
  Corpus singular;
  for (const auto& s : c) {
    if (s.number == Number::Singular) singular.push_back(s);
  }
  for (int v : V().members(WordClass::Verb, Number::Singular)) m.b_out[static_cast<std::size_t>(v)] = 2.0;
  const auto split = split_correct_wrong(m, singular);
  CHECK(split.wrong.empty());
  CHECK(split.correct.size() == singular.size());
  CHECK_FALSE(split.warnings.empty());  // fewer than 50 on both sides
}

TEST_CASE("DC objective gradient matches finite differences") {
  const auto d = clusters(60, 0.4, 6);
  const auto recs = balanced_records(d, 1);
  Rng rng(3);
  Vector x(6);
  for (auto& v : x) v = rng.uniform(-1, 1);
  auto f = [&](std::span<const double> p) {
    return dc_objective(p.subspan(0, 5), p[5], recs, 0.01);
  };
  Vector gw;
  double gb = 0;
  dc_objective(std::span<const double>(x).subspan(0, 5), x[5], recs, 0.01, &gw, &gb);
  gw.push_back(gb);
  CHECK(check_gradient(f, gw, x, 1e-5) < 1e-6);
}

TEST_CASE("separable clusters are learned along the class-mean direction") {
  const auto d = clusters(200, 2.0, 7);
  const auto dc = train_dc(d, DcHyper{});
  CHECK(dc_accuracy(dc, d) == 1.0);
  Vector mean_pl(5, 0.0), mean_sg(5, 0.0);
  for (const auto& r : d.records) {
    auto& m = r.label == Number::Plural ? mean_pl : mean_sg;
    for (std::size_t j = 0; j < 5; ++j) m[j] += r.vector[j] / 100.0;
  }
  Vector diff(5);
  for (std::size_t j = 0; j < 5; ++j) diff[j] = mean_pl[j] - mean_sg[j];
  CHECK(dot(dc.w, diff) > 0.0);
  CHECK(dc.component == d.component);
  CHECK(dc.scope == d.scope);
}

TEST_CASE("label-free features give chance held-out accuracy") {
  Rng rng(8);
  auto noise = [&](std::size_t n, std::size_t base) {
    ActivationDataset d{ComponentId{0, Kind::H}, TimestepScope::at(0), {}};
    for (std::size_t i = 0; i < n; ++i) {
      Vector x(8);
      for (auto& v : x) v = rng.normal();
      d.records.push_back({x, i % 2 ? Number::Plural : Number::Singular, 0, d.component, base + i});
    }
    return d;
  };
  const auto train = noise(400, 0);
  const auto test = noise(400, 400);
  const auto dc = train_dc(train, DcHyper{});
  CHECK(std::abs(dc_accuracy(dc, test) - 0.5) <= 0.1);

  Rng shuffle_rng(2);
  const auto structured = clusters(400, 1.0, 9);
  const auto held_out = clusters(400, 1.0, 10, 400);
  const auto null_dc = train_dc(shuffle_labels(structured, shuffle_rng), DcHyper{});
  CHECK(std::abs(dc_accuracy(null_dc, shuffle_labels(held_out, shuffle_rng)) - 0.5) <= 0.1);
}

TEST_CASE("shuffle_labels permutes whole sentences") {
  const LstmLm m = small_model();
  const Corpus c = corpus("WD-K0-L3-M0-A-", 50, 11);
  const auto d = extract_activations(m, c, ComponentId{0, Kind::H}, TimestepScope::pooled());
  Rng rng(1);
  const auto s = shuffle_labels(d, rng);
  std::size_t pl_before = 0, pl_after = 0;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    pl_before += d.records[i].label == Number::Plural;
    pl_after += s.records[i].label == Number::Plural;
    if (i > 0 && d.records[i].sentence_id == d.records[i - 1].sentence_id) {
      CHECK(s.records[i].label == s.records[i - 1].label);
    }
  }
  CHECK(pl_before == pl_after);
}

TEST_CASE("duplicating every record leaves the trained DC unchanged") {
  const auto d = clusters(80, 0.5, 12);
  auto doubled = d;
  for (const auto& r : d.records) doubled.records.push_back(r);
  const auto a = train_dc(d, DcHyper{});
  const auto b = train_dc(doubled, DcHyper{});
  for (std::size_t j = 0; j < a.w.size(); ++j) CHECK(a.w[j] == doctest::Approx(b.w[j]).epsilon(1e-12));
  CHECK(a.b == doctest::Approx(b.b).epsilon(1e-12));
}

TEST_CASE("balancing downsamples the majority deterministically") {
  auto d = clusters(100, 0.5, 13);
  for (int i = 0; i < 30; ++i) d.records.push_back(d.records[0]);  // extra singulars
  const auto a = balanced_records(d, 4);
  const auto b = balanced_records(d, 4);
  CHECK(a == b);
  std::size_t pl = 0;
  for (const auto* r : a) pl += r->label == Number::Plural;
  CHECK(pl * 2 == a.size());
  CHECK_THROWS(train_dc(ActivationDataset{ComponentId{}, TimestepScope::at(0), {d.records[0]}}, DcHyper{}));
}

TEST_CASE("DC loss is non-increasing at a small learning rate") {
  const auto d = clusters(100, 0.3, 14);
  DcHyper h;
  h.lr = 1e-3;
  h.epochs = 300;
  const auto dc = train_dc(d, h);
  REQUIRE(dc.loss_history.size() == 301);
  for (std::size_t e = 1; e < dc.loss_history.size(); ++e) {
    CHECK(dc.loss_history[e] <= dc.loss_history[e - 1]);
  }
}

TEST_CASE("prediction threshold and brute-force accuracy") {
  DiagnosticClassifier dc;
  dc.w = Vector(3, 0.0);
  CHECK(dc.predict(Vector{1, 2, 3}) == 0.5);
  CHECK(dc.classify(Vector{1, 2, 3}) == Number::Singular);
  CHECK_THROWS_AS(dc_predict(dc, Vector{1, 2}), DimensionError);

  dc.w = {1.0, -1.0, 0.5};
  dc.b = 0.1;
  const auto d = clusters(50, 0.2, 15);
  ActivationDataset three{d.component, d.scope, {}};
  for (auto r : d.records) {
    r.vector.resize(3);
    three.records.push_back(r);
  }
  std::size_t right = 0;
  for (const auto& r : three.records) {
    const double z = dc.w[0] * r.vector[0] + dc.w[1] * r.vector[1] + dc.w[2] * r.vector[2] + dc.b;
    right += (z > 0 ? Number::Plural : Number::Singular) == r.label;
  }
  CHECK(dc_accuracy(dc, three) == doctest::Approx(static_cast<double>(right) / 50.0).epsilon(1e-15));
  ActivationDataset one{d.component, d.scope, {three.records[0]}};
  one.records[0].label = dc.classify(one.records[0].vector);
  CHECK(dc_accuracy(dc, one) == 1.0);
  CHECK_THROWS(dc_accuracy(dc, ActivationDataset{}));
}

TEST_CASE("constant classifier on a balanced test set scores one half") {
  DiagnosticClassifier dc;
  dc.w = Vector(5, 0.0);
  dc.b = 3.0;
  CHECK(dc_accuracy(dc, clusters(100, 1.0, 16)) == 0.5);
}

TEST_CASE("temporal matrix on synthetic fixtures") {
  DcHyper h;
  h.seed = 5;
  const auto ctr = synthetic_timestep_datasets(SyntheticEncoding::Constant, 200, 16, 5, h.seed, 0);
  const auto cte = synthetic_timestep_datasets(SyntheticEncoding::Constant, 200, 16, 5, h.seed, 200);
  const auto cm = generalization_matrix(MatrixAxis::Temporal, ctr, cte, h);
  REQUIRE(cm.rows() == 5);
  REQUIRE(cm.cols() == 5);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 5; ++c) {
      CHECK(cm.at(r, c) >= 0.95);
      CHECK(cm.count_at(r, c) == 200);
    }
  }
  const auto otr = synthetic_timestep_datasets(SyntheticEncoding::Onset, 200, 16, 5, h.seed, 0);
  const auto ote = synthetic_timestep_datasets(SyntheticEncoding::Onset, 200, 16, 5, h.seed, 200);
  const auto om = generalization_matrix(MatrixAxis::Temporal, otr, ote, h);
  CHECK(om.at(0, 0) >= 0.95);
  for (std::size_t c = 1; c < 5; ++c) {
    CHECK(om.at(0, c) >= 0.4);
    CHECK(om.at(0, c) <= 0.6);
  }
  CHECK(om.row_labels.front() == "t0");
}

TEST_CASE("duplicated dataset gives a uniform 2x2 block") {
  const auto train = clusters(100, 0.4, 17);
  const auto test = clusters(100, 0.4, 18, 100);
  const auto gm = generalization_matrix(MatrixAxis::Spatial, {{"a", train}, {"b", train}},
                                        {{"a", test}, {"b", test}}, DcHyper{});
  CHECK(gm.at(0, 1) == gm.at(1, 0));
  CHECK(gm.at(0, 0) == gm.at(1, 1));
  CHECK(gm.at(0, 0) == gm.at(0, 1));
}

TEST_CASE("model matrices: bounds, counts, diagonal and disjointness") {
  const LstmLm m = small_model();
  const Corpus train = corpus("WD-K*-L5-M*-A3", 120, 19);
  const Corpus test = remove_overlap(corpus("WD-K*-L5-M*-A3", 80, 20), train);
  DcHyper h;
  h.epochs = 50;
  h.seed = 3;
  const auto tgm = temporal_generalization_matrix(m, train, test, ComponentId{1, Kind::C}, 0, 6, h);
  CHECK(tgm.rows() == 7);
  for (std::size_t i = 0; i < tgm.accuracy.size(); ++i) {
    CHECK(tgm.accuracy[i] >= 0.0);
    CHECK(tgm.accuracy[i] <= 1.0);
    CHECK(tgm.counts[i] == test.size());
  }
  const auto sgm = spatial_generalization_matrix(m, train, test, 4, h);
  CHECK(sgm.rows() == 10);
  const auto traces_train = trace_corpus(m, train);
  const auto traces_test = trace_corpus(m, test);
  for (std::size_t r = 0; r < 10; ++r) {
    const auto id = ComponentId::all()[r];
    DcHyper hr = h;
    hr.seed = derive_seed(h.seed, "gm-row", r);
    const auto dc = train_dc(extract_activations(traces_train, train, id, TimestepScope::at(4)), hr);
    CHECK(sgm.at(r, r) == dc_accuracy(dc, extract_activations(traces_test, test, id, TimestepScope::at(4))));
  }
  CHECK(temporal_generalization_matrix(m, train, test, ComponentId{1, Kind::C}, 0, 6, h).accuracy ==
        tgm.accuracy);
  CHECK_THROWS(temporal_generalization_matrix(m, train, train, ComponentId{1, Kind::C}, 0, 6, h));
  CHECK_THROWS(require_disjoint(train, Corpus{train.front()}));
}

TEST_CASE("DC text round-trip") {
  const auto d = clusters(60, 1.0, 22);
  DcHyper h;
  h.seed = 77;
  auto a = train_dc(d, h);
  auto b = a;
  b.component = ComponentId{0, Kind::F};
  b.scope = TimestepScope::pooled();
  const auto text = format_dcs({a, b});
  const auto back = parse_dcs(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].w == a.w);
  CHECK(back[0].b == a.b);
  CHECK(back[0].hyper.seed == 77);
  CHECK(back[1].component == b.component);
  CHECK(back[1].scope == b.scope);
  CHECK(format_dcs(back) == text);
  CHECK_THROWS(parse_dcs("component = h0\nscope = t0\ndim = 2\nbias = 0\nweights = 1\n"));
}
