// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <agp/agp.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const char* name) {
  auto p = fs::temp_directory_path() / ("agp_capi_" + std::to_string(::getpid())) / name;
  fs::create_directories(p.parent_path());
  return p;
}

struct Fixture {
  agp_vocab* vocab = nullptr;
  agp_corpus* corpus = nullptr;
  agp_model* model = nullptr;
  Fixture() {
    REQUIRE(agp_vocab_builtin(&vocab) == AGP_OK);
    REQUIRE(agp_corpus_generate(vocab, "WD-K*-L5-M*-A3", 60, 3, &corpus) == AGP_OK);
    REQUIRE(agp_model_create(agp_vocab_size(vocab), 8, 10, 4, &model) == AGP_OK);
  }
  ~Fixture() {
    agp_model_free(model);
    agp_corpus_free(corpus);
    agp_vocab_free(vocab);
  }
};

}  // namespace

TEST_CASE("status names and last error") {
  CHECK(std::string(agp_status_name(AGP_OK)) == "ok");
  CHECK(std::string(agp_status_name(AGP_ERR_PARSE)) == "parse_error");
  char buf[64];
  CHECK(agp_spec_normalize("WD-K1-L5-M1-X3", buf, sizeof buf) == AGP_ERR_PARSE);
  CHECK(std::strlen(agp_last_error()) > 0);
  REQUIRE(agp_spec_normalize("WD-K1-L5-M1-A3", buf, sizeof buf) == AGP_OK);
  CHECK(std::string(buf) == "WD-K1-L5-M1-A3");
  CHECK(agp_spec_normalize("WD-K1-L5-M1-A3", buf, 4) == AGP_ERR_INVALID_ARGUMENT);
  CHECK(agp_corpus_generate(nullptr, "WD-K1-L5-M1-A3", 1, 1, nullptr) == AGP_ERR_INVALID_ARGUMENT);
  agp_vocab* v = nullptr;
  CHECK(agp_vocab_load("/nonexistent/vocab.txt", &v) == AGP_ERR_IO);
  CHECK(v == nullptr);
  agp_vocab_free(nullptr);
  agp_corpus_free(nullptr);
  agp_model_free(nullptr);
}

TEST_CASE("corpus operations") {
  Fixture f;
  CHECK(agp_corpus_size(f.corpus) == 60);
  size_t invalid = 99;
  REQUIRE(agp_corpus_count_invalid(f.corpus, f.vocab, &invalid) == AGP_OK);
  CHECK(invalid == 0);
  const auto path = scratch("c.tsv").string();
  REQUIRE(agp_corpus_write_tsv(f.corpus, f.vocab, path.c_str()) == AGP_OK);
  agp_corpus* back = nullptr;
  REQUIRE(agp_corpus_read_tsv(f.vocab, path.c_str(), &back) == AGP_OK);
  CHECK(agp_corpus_size(back) == 60);
  agp_corpus* rest = nullptr;
  REQUIRE(agp_corpus_remove_overlap(back, f.corpus, &rest) == AGP_OK);
  CHECK(agp_corpus_size(rest) == 0);
  agp_corpus* sg = nullptr;
  REQUIRE(agp_corpus_filter(f.corpus, "WD-K0-L5-M0-A3", &sg) == AGP_OK);
  CHECK(agp_corpus_size(sg) <= 60);
  agp_corpus* unsat = nullptr;
  CHECK(agp_corpus_generate(f.vocab, "WD-K0-L1-M0-A1", 2, 1, &unsat) == AGP_ERR_CONSTRAINT);
  agp_corpus_free(sg);
  agp_corpus_free(rest);
  agp_corpus_free(back);
}

TEST_CASE("model, DCs, matrices and intervention through handles") {
  Fixture f;
  agp_train_params tp;
  agp_train_params_default(&tp);
  CHECK(tp.lr == 0.005);
  CHECK(tp.epochs == 6);
  tp.epochs = 2;
  double losses[4] = {0};
  size_t done = 0;
  REQUIRE(agp_model_train(f.model, f.corpus, &tp, losses, 4, &done) == AGP_OK);
  CHECK(done == 2);
  CHECK(losses[1] < losses[0]);

  const auto ckpt = scratch("m.ckpt").string();
  REQUIRE(agp_model_save(f.model, ckpt.c_str()) == AGP_OK);
  agp_model* loaded = nullptr;
  REQUIRE(agp_model_load(ckpt.c_str(), &loaded) == AGP_OK);
  double a1 = 0, a2 = 0;
  REQUIRE(agp_model_agreement(f.model, f.corpus, &a1, nullptr) == AGP_OK);
  REQUIRE(agp_model_agreement(loaded, f.corpus, &a2, nullptr) == AGP_OK);
  CHECK(a1 == a2);
  size_t v, e, h, l;
  REQUIRE(agp_model_dims(loaded, &v, &e, &h, &l) == AGP_OK);
  CHECK(h == 10);
  CHECK(l == 2);
  agp_model_free(loaded);
  {
    FILE* fp = std::fopen(ckpt.c_str(), "r+b");
    std::fseek(fp, 20, SEEK_SET);
    std::fputc(0x5a, fp);
    std::fclose(fp);
  }
  CHECK(agp_model_load(ckpt.c_str(), &loaded) == AGP_ERR_FORMAT);

  int comp = -1;
  REQUIRE(agp_component_parse("c1", &comp) == AGP_OK);
  CHECK(std::string(agp_component_name(comp)) == "c1");
  CHECK(agp_component_parse("z9", &comp) == AGP_ERR_PARSE);

  agp_dc_params dp;
  agp_dc_params_default(&dp);
  agp_dc_set* set = nullptr;
  REQUIRE(agp_dc_set_create(&set) == AGP_OK);
  for (const char* name : {"h0", "c0", "h1", "c1"}) {
    REQUIRE(agp_component_parse(name, &comp) == AGP_OK);
    REQUIRE(agp_dc_train(f.model, f.corpus, comp, "t0", &dp, set) == AGP_OK);
  }
  CHECK(agp_dc_set_size(set) == 4);
  char scope[16];
  size_t dim = 0;
  REQUIRE(agp_dc_set_info(set, 3, &comp, scope, sizeof scope, &dim) == AGP_OK);
  CHECK(std::string(scope) == "t0");
  CHECK(dim == 10);
  CHECK(agp_dc_set_info(set, 4, &comp, scope, sizeof scope, &dim) == AGP_ERR_INVALID_ARGUMENT);
  double acc = -1;
  REQUIRE(agp_dc_accuracy(set, 0, f.model, f.corpus, &acc) == AGP_OK);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
  const auto dcs = scratch("dcs.txt").string();
  REQUIRE(agp_dc_set_save(set, dcs.c_str()) == AGP_OK);
  agp_dc_set* set2 = nullptr;
  REQUIRE(agp_dc_set_load(dcs.c_str(), &set2) == AGP_OK);
  double acc2 = -1;
  REQUIRE(agp_dc_accuracy(set2, 0, f.model, f.corpus, &acc2) == AGP_OK);
  CHECK(acc == acc2);

  agp_matrix* m = nullptr;
  REQUIRE(agp_tgm_fixture(AGP_FIXTURE_CONSTANT, 200, 200, 16, 4, &dp, &m) == AGP_OK);
  CHECK(agp_matrix_rows(m) == 4);
  for (size_t r = 0; r < 4; ++r) {
    for (size_t c = 0; c < 4; ++c) CHECK(agp_matrix_at(m, r, c) >= 0.95);
  }
  const auto prefix = scratch("tgm").string();
  REQUIRE(agp_matrix_write(m, prefix.c_str(), "fixture") == AGP_OK);
  CHECK(fs::exists(prefix + ".svg"));
  agp_matrix_free(m);

  agp_intervention_params ip;
  agp_intervention_params_default(&ip);
  CHECK(ip.eta == 0.5);
  CHECK(ip.targets == ((1u << 0) | (1u << 1) | (1u << 5) | (1u << 6)));
  agp_report* rep = nullptr;
  REQUIRE(agp_intervention_compare(f.model, f.corpus, set, &ip, nullptr, &rep) == AGP_OK);
  double without = 0, with = 0, mean = -1, max = -1;
  REQUIRE(agp_report_accuracy(rep, &without, &with) == AGP_OK);
  CHECK(without == a1);
  REQUIRE(agp_report_dlogp(rep, &mean, &max) == AGP_OK);
  CHECK(mean >= 0);
  CHECK(max >= mean);
  const auto dir = scratch("rep").string();
  fs::create_directories(dir);
  REQUIRE(agp_report_write(rep, f.vocab, 1, dir.c_str()) == AGP_OK);
  CHECK(fs::exists(dir + "/summary.json"));
  agp_report_free(rep);

  ip.targets = 1u << 2;  // gate
  CHECK(agp_intervention_compare(f.model, f.corpus, set, &ip, nullptr, &rep) != AGP_OK);

  agp_dc_set_free(set2);
  agp_dc_set_free(set);
  fs::remove_all(fs::path(ckpt).parent_path());
}
