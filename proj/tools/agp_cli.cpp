// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0
//
// agp: command-line front end for the agreement-probe library.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "agp/agp.h"

namespace fs = std::filesystem;

namespace {

// Raised for every failure; main() turns it into a single-line error.
struct CliFailure {
  std::string kind;
  std::string message;
};

void check(agp_status st, const std::string& context) {
  if (st != AGP_OK) throw CliFailure{agp_status_name(st), context + ": " + agp_last_error()};
}

[[noreturn]] void fail(const std::string& kind, const std::string& message) {
  throw CliFailure{kind, message};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Vocab = std::unique_ptr<agp_vocab, Deleter<agp_vocab, agp_vocab_free>>;
using Corpus = std::unique_ptr<agp_corpus, Deleter<agp_corpus, agp_corpus_free>>;
using Model = std::unique_ptr<agp_model, Deleter<agp_model, agp_model_free>>;
using DcSet = std::unique_ptr<agp_dc_set, Deleter<agp_dc_set, agp_dc_set_free>>;
using Matrix = std::unique_ptr<agp_matrix, Deleter<agp_matrix, agp_matrix_free>>;
using Report = std::unique_ptr<agp_report, Deleter<agp_report, agp_report_free>>;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail("io_error", "cannot write '" + p.string() + "'");
  out << text;
  if (!out) fail("io_error", "write failed for '" + p.string() + "'");
}

// ---- options shared by all commands

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
  std::string vocab;
};

struct Options {
  Common common;
  // gen-corpus
  std::string spec;
  std::size_t n = 1000;
  std::size_t nonce = 0;
  std::string exclude;
  bool balance = false;
  // train-lm
  std::string corpus;
  std::size_t embed = 32;
  std::size_t hidden = 64;
  double lr = 0.0;
  int epochs = 0;
  double clip = 0.0;
  std::size_t batch = 0;
  std::string optimizer;
  // evaluation inputs
  std::string ckpt;
  std::string test;
  std::string dcs;
  std::string probes;
  // probe / matrices
  std::string component = "all";
  std::string tgm_component = "h1";
  std::size_t fixture_n = 200;
  std::string scope = "pooled";
  bool permutation_null = false;
  double dc_lr = 0.0;
  int dc_epochs = 0;
  double dc_l2 = 0.0;
  int t_from = -1;
  int t_to = 6;
  int timestep = 4;
  int apply_at = 0;
  std::string fixture;
  std::size_t dim = 16;
  int timesteps = 6;
  // intervene
  double eta = 0.5;
  std::string targets = "h0,c0,h1,c1";
  std::string error = "squared";
  int steps = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "experiment seed")->required();
  sub->add_option("--out", c.out, "output directory")->required();
  sub->add_option("--vocab", c.vocab, "word-class file (default: built-in vocabulary)");
}

void add_dc_options(CLI::App* sub, Options& o) {
  sub->add_option("--dc-lr", o.dc_lr, "diagnostic classifier learning rate");
  sub->add_option("--dc-epochs", o.dc_epochs, "diagnostic classifier epochs");
  sub->add_option("--dc-l2", o.dc_l2, "diagnostic classifier L2 penalty");
}

Vocab load_vocab(const Common& c) {
  agp_vocab* v = nullptr;
  if (c.vocab.empty()) {
    check(agp_vocab_builtin(&v), "vocabulary");
  } else {
    check(agp_vocab_load(c.vocab.c_str(), &v), "vocabulary '" + c.vocab + "'");
  }
  return Vocab(v);
}

Corpus read_corpus(const agp_vocab* v, const std::string& path, const char* what) {
  if (path.empty()) fail("invalid_argument", std::string("--") + what + " is required");
  if (!fs::exists(path)) fail("io_error", std::string("--") + what + " file '" + path + "' does not exist");
  agp_corpus* c = nullptr;
  check(agp_corpus_read_tsv(v, path.c_str(), &c), "reading '" + path + "'");
  return Corpus(c);
}

Model load_model(const std::string& path, const agp_vocab* v) {
  if (path.empty()) fail("invalid_argument", "--ckpt is required");
  if (!fs::exists(path)) fail("io_error", "--ckpt file '" + path + "' does not exist");
  agp_model* m = nullptr;
  check(agp_model_load(path.c_str(), &m), "loading '" + path + "'");
  Model model(m);
  std::size_t vocab = 0;
  check(agp_model_dims(m, &vocab, nullptr, nullptr, nullptr), "model");
  if (vocab != agp_vocab_size(v)) {
    fail("dimension_error", "checkpoint vocabulary size " + std::to_string(vocab) +
                                " differs from vocabulary size " + std::to_string(agp_vocab_size(v)));
  }
  return model;
}

DcSet load_dcs(const std::string& path, const agp_model* model, const char* what) {
  if (!fs::exists(path)) fail("io_error", std::string("--") + what + " file '" + path + "' does not exist");
  agp_dc_set* s = nullptr;
  check(agp_dc_set_load(path.c_str(), &s), "loading '" + path + "'");
  DcSet set(s);
  std::size_t hidden = 0;
  check(agp_model_dims(model, nullptr, nullptr, &hidden, nullptr), "model");
  for (std::size_t i = 0; i < agp_dc_set_size(s); ++i) {
    std::size_t dim = 0;
    check(agp_dc_set_info(s, i, nullptr, nullptr, 0, &dim), "dc info");
    if (dim != hidden) {
      fail("dimension_error", "classifier " + std::to_string(i) + " in '" + path + "' has dimension " +
                                  std::to_string(dim) + " but the checkpoint hidden size is " +
                                  std::to_string(hidden));
    }
  }
  return set;
}

agp_dc_params dc_params(const Options& o, const char* task) {
  agp_dc_params p;
  agp_dc_params_default(&p);
  if (o.dc_lr > 0) p.lr = o.dc_lr;
  if (o.dc_epochs > 0) p.epochs = o.dc_epochs;
  if (o.dc_l2 > 0) p.l2 = o.dc_l2;
  p.seed = agp_derive_seed(o.common.seed, task, 0);
  return p;
}

std::vector<int> parse_components(const std::string& s) {
  std::vector<int> out;
  if (s == "all") {
    for (int i = 0; i < 10; ++i) out.push_back(i);
    return out;
  }
  for (const auto& name : split_list(s)) {
    int idx = 0;
    check(agp_component_parse(name.c_str(), &idx), "--component");
    out.push_back(idx);
  }
  if (out.empty()) fail("invalid_argument", "--component lists no components");
  return out;
}

// ---- commands

void cmd_gen_corpus(const Options& o, const fs::path& out) {
  if (o.spec.empty()) fail("invalid_argument", "--spec is required");
  if (o.n == 0) fail("invalid_argument", "--n must be positive");
  const Vocab vocab = load_vocab(o.common);
  agp_corpus* raw = nullptr;
  check(agp_corpus_create(&raw), "corpus");
  Corpus all(raw);
  const auto specs = split_list(o.spec);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    agp_corpus* part = nullptr;
    check(agp_corpus_generate(vocab.get(), specs[i].c_str(), o.n,
                              agp_derive_seed(o.common.seed, "gen-corpus", i), &part),
          "--spec '" + specs[i] + "'");
    Corpus p(part);
    if (o.nonce > 0) {
      agp_corpus* nv = nullptr;
      check(agp_corpus_nonce(p.get(), vocab.get(), o.nonce,
                             agp_derive_seed(o.common.seed, "gen-corpus-nonce", i), &nv),
            "nonce variants");
      p.reset(nv);
    }
    check(agp_corpus_append(all.get(), p.get()), "corpus");
  }
  if (!o.exclude.empty()) {
    const Corpus other = read_corpus(vocab.get(), o.exclude, "exclude");
    agp_corpus* kept = nullptr;
    check(agp_corpus_remove_overlap(all.get(), other.get(), &kept), "exclude");
    all.reset(kept);
  }
  if (o.balance) {
    agp_corpus* b = nullptr;
    check(agp_corpus_balance(all.get(), agp_derive_seed(o.common.seed, "gen-corpus-balance", 0), &b),
          "balance");
    all.reset(b);
  }
  std::size_t invalid = 0;
  check(agp_corpus_count_invalid(all.get(), vocab.get(), &invalid), "validation");
  if (invalid != 0) fail("constraint_error", std::to_string(invalid) + " generated sentences failed validation");
  check(agp_corpus_write_tsv(all.get(), vocab.get(), (out / "corpus.tsv").string().c_str()), "writing corpus");
  std::cout << "sentences " << agp_corpus_size(all.get()) << "\n";
}

void cmd_train_lm(const Options& o, const fs::path& out) {
  const Vocab vocab = load_vocab(o.common);
  const Corpus corpus = read_corpus(vocab.get(), o.corpus, "corpus");
  agp_model* m = nullptr;
  check(agp_model_create(agp_vocab_size(vocab.get()), o.embed, o.hidden,
                         agp_derive_seed(o.common.seed, "train-lm-init", 0), &m),
        "model");
  Model model(m);
  agp_train_params p;
  agp_train_params_default(&p);
  if (o.lr > 0) p.lr = o.lr;
  if (o.epochs > 0) p.epochs = o.epochs;
  if (o.clip > 0) p.clip = o.clip;
  if (o.batch > 0) p.batch_size = o.batch;
  if (!o.optimizer.empty()) {
    if (o.optimizer == "sgd") {
      p.optimizer = AGP_OPTIMIZER_SGD;
    } else if (o.optimizer == "adam") {
      p.optimizer = AGP_OPTIMIZER_ADAM;
    } else {
      fail("parse_error", "--optimizer must be 'sgd' or 'adam', got '" + o.optimizer + "'");
    }
  }
  p.seed = o.common.seed;
  std::vector<double> losses(static_cast<std::size_t>(p.epochs));
  std::size_t done = 0;
  check(agp_model_train(model.get(), corpus.get(), &p, losses.data(), losses.size(), &done), "training");
  check(agp_model_save(model.get(), (out / "model.ckpt").string().c_str()), "saving checkpoint");
  std::string log = "epoch,mean_token_loss\n";
  for (std::size_t e = 0; e < done; ++e) log += std::to_string(e + 1) + "," + fmt_double(losses[e]) + "\n";
  write_file(out / "loss.csv", log);
  double ppl = 0;
  check(agp_model_perplexity(model.get(), corpus.get(), &ppl), "perplexity");
  std::cout << "epochs " << done << " final_loss " << (done ? fmt_double(losses[done - 1]) : "nan")
            << " train_perplexity " << fmt_double(ppl) << "\n";
}

void cmd_eval_agreement(const Options& o, const fs::path& out) {
  const Vocab vocab = load_vocab(o.common);
  const Model model = load_model(o.ckpt, vocab.get());
  if (o.test.empty()) fail("invalid_argument", "--test is required");
  std::string table = "test,sentences,accuracy,perplexity\n";
  std::string rows = "test,sentence,correct\n";
  for (const auto& path : split_list(o.test)) {
    const Corpus test = read_corpus(vocab.get(), path, "test");
    const std::size_t n = agp_corpus_size(test.get());
    std::vector<unsigned char> outcomes(n);
    double acc = 0, ppl = 0;
    check(agp_model_agreement(model.get(), test.get(), &acc, outcomes.data()), "agreement");
    check(agp_model_perplexity(model.get(), test.get(), &ppl), "perplexity");
    const std::string name = fs::path(path).filename().string();
    table += name + "," + std::to_string(n) + "," + fmt_double(acc) + "," + fmt_double(ppl) + "\n";
    for (std::size_t i = 0; i < n; ++i) rows += name + "," + std::to_string(i) + "," + std::to_string(outcomes[i]) + "\n";
    std::cout << name << " accuracy " << fmt_double(acc) << " perplexity " << fmt_double(ppl) << "\n";
  }
  write_file(out / "agreement.csv", table);
  write_file(out / "outcomes.csv", rows);
}

void cmd_probe(const Options& o, const fs::path& out) {
  const Vocab vocab = load_vocab(o.common);
  const Model model = load_model(o.ckpt, vocab.get());
  const Corpus train = read_corpus(vocab.get(), o.corpus, "corpus");
  const auto components = parse_components(o.component);
  const agp_dc_params params = dc_params(o, "probe");

  agp_dc_set* raw = nullptr;
  check(agp_dc_set_create(&raw), "dc set");
  DcSet dcs(raw);
  for (int c : components) {
    auto train_fn = o.permutation_null ? agp_dc_train_shuffled : agp_dc_train;
    check(train_fn(model.get(), train.get(), c, o.scope.c_str(), &params, dcs.get()),
          std::string("training DC for ") + agp_component_name(c));
  }
  check(agp_dc_set_save(dcs.get(), (out / "dcs.txt").string().c_str()), "saving DCs");

  std::vector<std::pair<std::string, Corpus>> sets;
  if (!o.test.empty()) {
    const Corpus test = read_corpus(vocab.get(), o.test, "test");
    agp_corpus* correct = nullptr;
    agp_corpus* wrong = nullptr;
    check(agp_model_split(model.get(), test.get(), &correct, &wrong), "correct/wrong split");
    sets.emplace_back("correct", Corpus(correct));
    sets.emplace_back("wrong", Corpus(wrong));
  }
  std::string table = "component,scope,set,sentences,accuracy\n";
  bool first_curve = true;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const std::string name = agp_component_name(components[i]);
    double acc = 0;
    auto accuracy = [&](const agp_corpus* corpus, const std::string& label) {
      if (o.permutation_null) {
        const std::uint64_t seed = agp_derive_seed(o.common.seed, ("permutation-null-" + label).c_str(), i);
        check(agp_dc_accuracy_shuffled(dcs.get(), i, model.get(), corpus, seed, &acc), "accuracy");
      } else {
        check(agp_dc_accuracy(dcs.get(), i, model.get(), corpus, &acc), "accuracy");
      }
    };
    accuracy(train.get(), "train");
    table += name + "," + o.scope + ",train," + std::to_string(agp_corpus_size(train.get())) + "," +
             fmt_double(acc) + "\n";
    for (const auto& [label, corpus] : sets) {
      if (agp_corpus_size(corpus.get()) == 0) {
        table += name + "," + o.scope + "," + label + ",0,\n";
        continue;
      }
      accuracy(corpus.get(), label);
      table += name + "," + o.scope + "," + label + "," + std::to_string(agp_corpus_size(corpus.get())) +
               "," + fmt_double(acc) + "\n";
    }
  }
  for (const auto& [label, corpus] : sets) {
    // curves score against the true labels, which a null classifier cannot predict
    if (o.permutation_null || agp_corpus_size(corpus.get()) == 0) continue;
    check(agp_dc_write_curves(dcs.get(), model.get(), corpus.get(), label.c_str(),
                              (out / "curves.csv").string().c_str(), first_curve ? 0 : 1),
          "curves");
    first_curve = false;
  }
  write_file(out / "accuracy.csv", table);
  std::cout << table;
}

void report_matrix(const agp_matrix* m) {
  for (std::size_t r = 0; r < agp_matrix_rows(m); ++r) {
    for (std::size_t c = 0; c < agp_matrix_cols(m); ++c) {
      std::cout << (c ? " " : "") << fmt_double(agp_matrix_at(m, r, c));
    }
    std::cout << "\n";
  }
}

void cmd_tgm(const Options& o, const fs::path& out) {
  const agp_dc_params params = dc_params(o, "tgm");
  agp_matrix* m = nullptr;
  std::string title;
  if (!o.fixture.empty()) {
    agp_fixture kind;
    if (o.fixture == "constant") {
      kind = AGP_FIXTURE_CONSTANT;
    } else if (o.fixture == "onset") {
      kind = AGP_FIXTURE_ONSET;
    } else {
      fail("parse_error", "--fixture must be 'constant' or 'onset', got '" + o.fixture + "'");
    }
    check(agp_tgm_fixture(kind, o.fixture_n, o.fixture_n, o.dim, o.timesteps, &params, &m), "fixture matrix");
    title = "temporal generalization, " + o.fixture + " fixture";
  } else {
    const Vocab vocab = load_vocab(o.common);
    const Model model = load_model(o.ckpt, vocab.get());
    const Corpus train = read_corpus(vocab.get(), o.corpus, "corpus");
    const Corpus test = read_corpus(vocab.get(), o.test, "test");
    const auto comps = parse_components(o.tgm_component);
    if (comps.size() != 1) fail("invalid_argument", "tgm needs exactly one --component");
    check(agp_tgm(model.get(), train.get(), test.get(), comps[0], o.t_from, o.t_to, &params, &m),
          "temporal matrix");
    title = std::string("temporal generalization, ") + agp_component_name(comps[0]);
  }
  const Matrix matrix(m);
  check(agp_matrix_write(matrix.get(), (out / "tgm").string().c_str(), title.c_str()), "writing matrix");
  report_matrix(matrix.get());
}

void cmd_sgm(const Options& o, const fs::path& out) {
  const agp_dc_params params = dc_params(o, "sgm");
  const Vocab vocab = load_vocab(o.common);
  const Model model = load_model(o.ckpt, vocab.get());
  const Corpus train = read_corpus(vocab.get(), o.corpus, "corpus");
  const Corpus test = read_corpus(vocab.get(), o.test, "test");
  agp_matrix* m = nullptr;
  check(agp_sgm(model.get(), train.get(), test.get(), o.timestep, &params, &m), "spatial matrix");
  const Matrix matrix(m);
  const std::string title = "spatial generalization, t" + std::to_string(o.timestep);
  check(agp_matrix_write(matrix.get(), (out / "sgm").string().c_str(), title.c_str()), "writing matrix");
  report_matrix(matrix.get());
}

void cmd_intervene(const Options& o, const fs::path& out) {
  const Vocab vocab = load_vocab(o.common);
  const Model model = load_model(o.ckpt, vocab.get());
  const Corpus test = read_corpus(vocab.get(), o.test, "test");
  if (o.dcs.empty()) fail("invalid_argument", "--dcs is required");
  const DcSet dcs = load_dcs(o.dcs, model.get(), "dcs");
  DcSet probes;
  if (!o.probes.empty()) probes = load_dcs(o.probes, model.get(), "probes");

  agp_intervention_params p;
  agp_intervention_params_default(&p);
  p.eta = o.eta;
  p.apply_at = o.apply_at;
  p.steps = o.steps;
  p.targets = 0;
  for (int c : parse_components(o.targets)) p.targets |= 1u << c;
  if (o.error == "squared") {
    p.error = AGP_ERROR_SQUARED;
  } else if (o.error == "cross-entropy") {
    p.error = AGP_ERROR_CROSS_ENTROPY;
  } else {
    fail("parse_error", "--error must be 'squared' or 'cross-entropy', got '" + o.error + "'");
  }
  agp_report* r = nullptr;
  check(agp_intervention_compare(model.get(), test.get(), dcs.get(), &p, probes.get(), &r), "intervention");
  const Report report(r);
  check(agp_report_write(report.get(), vocab.get(), o.common.seed, out.string().c_str()), "writing report");
  double without = 0, with = 0, mean = 0, max = 0;
  check(agp_report_accuracy(report.get(), &without, &with), "report");
  check(agp_report_dlogp(report.get(), &mean, &max), "report");
  std::cout << "accuracy_without " << fmt_double(without) << " accuracy_with " << fmt_double(with)
            << " mean_abs_dlogp " << fmt_double(mean) << " max_abs_dlogp " << fmt_double(max) << "\n";
}

// ---- config files and manifests

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io_error", "cannot read config '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail("parse_error", path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail("parse_error", path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

const std::set<std::string> kPathKeys = {"vocab", "corpus", "test", "ckpt", "dcs", "probes", "exclude"};

std::string manifest_value(const std::string& key, const std::string& value) {
  if (!kPathKeys.count(key) || value.empty()) return value;
  std::string joined;
  for (const auto& p : split_list(value)) {
    if (!joined.empty()) joined += ",";
    joined += fs::absolute(p).lexically_normal().string();
  }
  return joined;
}

std::string build_manifest(const CLI::App* sub) {
  std::map<std::string, std::string> kv;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string key = opt->get_single_name();
    if (key == "help" || key == "out" || key == "config" || opt->get_lnames().empty()) continue;
    std::string value;
    if (opt->get_expected_max() == 0) {
      value = opt->count() > 0 && opt->as<bool>() ? "true" : "false";
    } else if (opt->count() > 0) {
      value = opt->as<std::string>();
    } else {
      value = opt->get_default_str();
    }
    kv[key] = manifest_value(key, value);
  }
  std::string text = "command = " + sub->get_name() + "\n";
  for (const auto& [k, v] : kv) text += k + " = " + v + "\n";
  return text;
}

// Config entries become leading --key=value arguments; anything given on the
// command line comes later and wins.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.size() < 2) return args;
  std::string config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty()) return args;
  auto kv = read_key_values(config);
  std::vector<std::string> out = {args[0], args[1]};
  const auto cmd = kv.find("command");
  if (cmd != kv.end()) {
    if (cmd->second != args[1]) {
      fail("invalid_argument", "config '" + config + "' is for command '" + cmd->second +
                                   "', not '" + args[1] + "'");
    }
    kv.erase(cmd);
  }
  for (const auto& [k, v] : kv) {
    if (!v.empty()) out.push_back("--" + k + "=" + v);
  }
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

int run(std::vector<std::string> args) {
  CLI::App app{"agp: subject-verb agreement probing for LSTM language models"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  Options o;

  auto* gen = app.add_subcommand("gen-corpus", "generate, validate and write an agreement corpus");
  add_common(gen, o.common);
  gen->add_option("--spec", o.spec, "WD spec, or a comma-separated list of them")->required();
  gen->add_option("--n", o.n, "sentences per spec");
  gen->add_option("--nonce", o.nonce, "replace each sentence by this many nonce variants");
  gen->add_option("--exclude", o.exclude, "drop sentences that occur in this TSV");
  gen->add_flag("--balance", o.balance, "downsample to equal subject numbers");

  auto* train = app.add_subcommand("train-lm", "train the LSTM language model");
  add_common(train, o.common);
  train->add_option("--corpus", o.corpus, "training corpus TSV")->required();
  train->add_option("--embed", o.embed, "embedding size");
  train->add_option("--hidden", o.hidden, "hidden units per layer");
  train->add_option("--lr", o.lr, "learning rate (0: library default)");
  train->add_option("--epochs", o.epochs, "epochs (0: library default)");
  train->add_option("--clip", o.clip, "global gradient-norm clip (0: library default)");
  train->add_option("--batch", o.batch, "sentences per update (0: library default)");
  train->add_option("--optimizer", o.optimizer, "sgd or adam (empty: library default)");

  auto* eval = app.add_subcommand("eval-agreement", "agreement accuracy and perplexity");
  add_common(eval, o.common);
  eval->add_option("--ckpt", o.ckpt, "model checkpoint")->required();
  eval->add_option("--test", o.test, "test TSV, or a comma-separated list")->required();

  auto* probe = app.add_subcommand("probe", "train diagnostic classifiers and accuracy curves");
  add_common(probe, o.common);
  probe->add_option("--ckpt", o.ckpt, "model checkpoint")->required();
  probe->add_option("--corpus", o.corpus, "DC training corpus TSV")->required();
  probe->add_option("--test", o.test, "test TSV, split into correct and wrong sets");
  probe->add_option("--component", o.component, "component name, comma list, or 'all'");
  probe->add_option("--scope", o.scope, "pooled, t<n> or t<a>..<b>");
  probe->add_flag("--permutation-null", o.permutation_null, "train on shuffled labels");
  add_dc_options(probe, o);

  auto* tgm = app.add_subcommand("tgm", "temporal generalization matrix");
  add_common(tgm, o.common);
  tgm->add_option("--ckpt", o.ckpt, "model checkpoint");
  tgm->add_option("--corpus", o.corpus, "DC training corpus TSV");
  tgm->add_option("--test", o.test, "test TSV");
  tgm->add_option("--component", o.tgm_component, "component name");
  tgm->add_option("--from", o.t_from, "first relative timestep");
  tgm->add_option("--to", o.t_to, "last relative timestep");
  tgm->add_option("--fixture", o.fixture, "constant or onset: use synthetic activations");
  tgm->add_option("--n", o.fixture_n, "fixture sentences per split");
  tgm->add_option("--dim", o.dim, "fixture activation dimension");
  tgm->add_option("--timesteps", o.timesteps, "fixture timesteps");
  add_dc_options(tgm, o);

  auto* sgm = app.add_subcommand("sgm", "spatial generalization matrix");
  add_common(sgm, o.common);
  sgm->add_option("--ckpt", o.ckpt, "model checkpoint")->required();
  sgm->add_option("--corpus", o.corpus, "DC training corpus TSV")->required();
  sgm->add_option("--test", o.test, "test TSV")->required();
  sgm->add_option("--timestep", o.timestep, "relative timestep");
  add_dc_options(sgm, o);

  auto* inter = app.add_subcommand("intervene", "steer states with the DC delta rule");
  add_common(inter, o.common);
  inter->add_option("--ckpt", o.ckpt, "model checkpoint")->required();
  inter->add_option("--dcs", o.dcs, "DC file with one classifier per target")->required();
  inter->add_option("--test", o.test, "test TSV")->required();
  inter->add_option("--probes", o.probes, "DC file evaluated over time on both runs");
  inter->add_option("--eta", o.eta, "step size");
  inter->add_option("--component", o.targets, "target components, comma list");
  inter->add_option("--timestep", o.apply_at, "relative timestep of the update");
  inter->add_option("--error", o.error, "squared or cross-entropy");
  inter->add_option("--steps", o.steps, "delta-rule steps");

  auto* replay = app.add_subcommand("replay", "re-run a command from its manifest");
  std::string manifest, replay_out;
  replay->add_option("--manifest", manifest, "manifest file")->required();
  replay->add_option("--out", replay_out, "output directory")->required();

  for (auto* sub : {gen, train, eval, probe, tgm, sgm, inter}) {
    sub->add_option("--config", o.common.config, "flat key = value file of option defaults");
  }

  args = expand_config(args);
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    std::cerr << "error: usage_error: " << msg << "\n";
    return 2;
  }

  if (replay->parsed()) {
    const auto kv = read_key_values(manifest);
    const auto cmd = kv.find("command");
    if (cmd == kv.end()) fail("parse_error", "manifest '" + manifest + "' has no command entry");
    return run({args[0], cmd->second, "--config", manifest, "--out", replay_out});
  }

  CLI::App* sub = app.get_subcommands().front();
  const fs::path out(o.common.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail("io_error", "cannot create output directory '" + out.string() + "': " + ec.message());
  write_file(out / "manifest", build_manifest(sub));

  const std::string name = sub->get_name();
  if (name == "gen-corpus") cmd_gen_corpus(o, out);
  else if (name == "train-lm") cmd_train_lm(o, out);
  else if (name == "eval-agreement") cmd_eval_agreement(o, out);
  else if (name == "probe") cmd_probe(o, out);
  else if (name == "tgm") cmd_tgm(o, out);
  else if (name == "sgm") cmd_sgm(o, out);
  else if (name == "intervene") cmd_intervene(o, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(std::vector<std::string>(argv, argv + argc));
  } catch (const CliFailure& f) {
    std::string msg = f.message;
    for (auto& ch : msg) {
      if (ch == '\n' || ch == '\r') ch = ' ';
    }
    std::cerr << "error: " << f.kind << ": " << msg << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal_error: " << e.what() << "\n";
    return 1;
  }
}
