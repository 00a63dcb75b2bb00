// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#include "agp/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "agp/error.hpp"

namespace agp {

// ---------------------------------------------------------------------------
// Components and states

const std::array<ComponentId, 10>& ComponentId::all() {
  static const std::array<ComponentId, 10> ids = [] {
    std::array<ComponentId, 10> out{};
    for (int layer = 0; layer < 2; ++layer) {
      for (int k = 0; k < 5; ++k) out[layer * 5 + k] = ComponentId{layer, static_cast<Kind>(k)};
    }
    return out;
  }();
  return ids;
}

ComponentId ComponentId::parse(std::string_view name) {
  static constexpr std::string_view kKinds = "hcfio";
  if (name.size() != 2 || kKinds.find(name[0]) == std::string_view::npos ||
      (name[1] != '0' && name[1] != '1')) {
    throw ParseError("unknown component '" + std::string(name) +
                         "' (expected one of h0 c0 f0 i0 o0 h1 c1 f1 i1 o1)",
                     0, "component");
  }
  return ComponentId{name[1] - '0', static_cast<Kind>(kKinds.find(name[0]))};
}

std::string ComponentId::name() const {
  static constexpr char kKinds[] = "hcfio";
  return std::string(1, kKinds[static_cast<int>(kind)]) + std::to_string(layer);
}

const Vector& LayerState::get(Kind k) const {
  switch (k) {
    case Kind::H: return h;
    case Kind::C: return c;
    case Kind::F: return f;
    case Kind::I: return i;
    case Kind::O: return o;
  }
  return h;
}

Vector& LayerState::get(Kind k) {
  return const_cast<Vector&>(static_cast<const LayerState&>(*this).get(k));
}

// ---------------------------------------------------------------------------
// Parameters

LstmLm::LstmLm(Dims dims) : dims_(dims) {
  if (dims.vocab == 0 || dims.embed == 0 || dims.hidden == 0 || dims.layers == 0) {
    throw DimensionError("model dimensions must be positive");
  }
  const std::size_t h4 = 4 * dims.hidden;
  embedding = Matrix(dims.vocab, dims.embed);
  for (std::size_t l = 0; l < dims.layers; ++l) {
    const std::size_t in = l == 0 ? dims.embed : dims.hidden;
    layers.push_back(Layer{Matrix(h4, in), Matrix(h4, dims.hidden), Vector(h4, 0.0)});
  }
  w_out = Matrix(dims.vocab, dims.hidden);
  b_out = Vector(dims.vocab, 0.0);
}

LstmLm LstmLm::initialized(Dims dims, std::uint64_t seed) {
  LstmLm m(dims);
  Rng rng(seed);
  const double r = 1.0 / std::sqrt(static_cast<double>(dims.hidden));
  for (auto block : m.blocks()) {
    for (double& v : block) v = rng.uniform(-r, r);
  }
  for (auto& layer : m.layers) {
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    for (std::size_t j = dims.hidden; j < 2 * dims.hidden; ++j) layer.bias[j] = 1.0;
  }
  std::fill(m.b_out.begin(), m.b_out.end(), 0.0);
  m.round_to_float();
  return m;
}

std::vector<std::span<double>> LstmLm::blocks() {
  std::vector<std::span<double>> out{embedding.values()};
  for (auto& l : layers) {
    out.push_back(l.w_input.values());
    out.push_back(l.w_recurrent.values());
    out.push_back(l.bias);
  }
  out.push_back(w_out.values());
  out.push_back(b_out);
  return out;
}

std::vector<std::span<const double>> LstmLm::blocks() const {
  std::vector<std::span<const double>> out;
  for (auto b : const_cast<LstmLm*>(this)->blocks()) out.emplace_back(b.data(), b.size());
  return out;
}

std::size_t LstmLm::parameter_count() const {
  std::size_t n = 0;
  for (auto b : blocks()) n += b.size();
  return n;
}

Vector LstmLm::flatten() const {
  Vector out;
  out.reserve(parameter_count());
  for (auto b : blocks()) out.insert(out.end(), b.begin(), b.end());
  return out;
}

void LstmLm::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw DimensionError("assign: expected " + std::to_string(parameter_count()) +
                         " parameters, got " + std::to_string(flat.size()));
  }
  std::size_t pos = 0;
  for (auto b : blocks()) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), b.size(), b.begin());
    pos += b.size();
  }
}

void LstmLm::round_to_float() {
  for (auto b : blocks()) {
    for (double& v : b) v = static_cast<double>(static_cast<float>(v));
  }
}

void LstmLm::zero() {
  for (auto b : blocks()) std::fill(b.begin(), b.end(), 0.0);
}

bool LstmLm::all_finite() const {
  for (auto b : blocks()) {
    if (!agp::all_finite(b)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Forward

LayerState lstm_step(const LstmLm::Layer& layer, std::span<const double> x, const LayerState& prev) {
  const std::size_t hdim = layer.w_recurrent.cols();
  if (x.size() != layer.w_input.cols() || prev.h.size() != hdim || prev.c.size() != hdim) {
    throw DimensionError("lstm_step: input " + std::to_string(x.size()) + " / state " +
                         std::to_string(prev.h.size()) + " do not match layer " +
                         std::to_string(layer.w_input.cols()) + "/" + std::to_string(hdim));
  }
  Vector pre(layer.bias);
  matvec_accumulate(layer.w_input, x, pre);
  matvec_accumulate(layer.w_recurrent, prev.h, pre);
  LayerState s(hdim);
  for (std::size_t j = 0; j < hdim; ++j) {
    s.i[j] = sigmoid(pre[j]);
    s.f[j] = sigmoid(pre[hdim + j]);
    s.g[j] = std::tanh(pre[2 * hdim + j]);
    s.o[j] = sigmoid(pre[3 * hdim + j]);
    s.c[j] = s.f[j] * prev.c[j] + s.i[j] * s.g[j];
    s.h[j] = s.o[j] * std::tanh(s.c[j]);
  }
  return s;
}

StepState initial_state(const LstmLm& model) {
  StepState s;
  s.layers.assign(model.dims().layers, LayerState(model.dims().hidden));
  return s;
}

StepState step(const LstmLm& model, int token, const StepState& prev) {
  if (token < 0 || static_cast<std::size_t>(token) >= model.dims().vocab) {
    throw DimensionError("token id " + std::to_string(token) + " outside model vocabulary of " +
                         std::to_string(model.dims().vocab));
  }
  if (prev.layers.size() != model.layers.size()) throw DimensionError("state has wrong layer count");
  StepState next;
  next.layers.reserve(model.layers.size());
  std::span<const double> x = model.embedding.row(static_cast<std::size_t>(token));
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    next.layers.push_back(lstm_step(model.layers[l], x, prev.layers[l]));
    x = next.layers.back().h;
  }
  return next;
}

Vector output_logits(const LstmLm& model, const StepState& state) {
  Vector logits(model.b_out);
  matvec_accumulate(model.w_out, state.layers.back().h, logits);
  return logits;
}

ActivationTrace forward(const LstmLm& model, std::span<const int> tokens) {
  if (tokens.empty()) throw DimensionError("forward: empty input");
  ActivationTrace trace;
  trace.steps.reserve(tokens.size());
  trace.logits.reserve(tokens.size());
  StepState state = initial_state(model);
  for (int tok : tokens) {
    state = step(model, tok, state);
    trace.logits.push_back(output_logits(model, state));
    trace.steps.push_back(state);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Loss and backpropagation through time

double sentence_loss(const LstmLm& model, std::span<const int> tokens, int end_token,
                     LstmLm* grad) {
  const ActivationTrace trace = forward(model, tokens);
  const std::size_t n = tokens.size();
  const std::size_t hdim = model.dims().hidden;
  const std::size_t nl = model.layers.size();

  // dh_in[l][t]: gradient arriving at h of layer l at time t from above.
  std::vector<std::vector<Vector>> dh_in(nl, std::vector<Vector>(n, Vector(hdim, 0.0)));
  double loss = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const int target = t + 1 < n ? tokens[t + 1] : end_token;
    const Vector& logits = trace.logits[t];
    loss += log_sum_exp(logits) - logits[static_cast<std::size_t>(target)];
    if (!grad) continue;
    Vector p = softmax(logits);
    p[static_cast<std::size_t>(target)] -= 1.0;
    const Vector& h_top = trace.steps[t].layers.back().h;
    outer_accumulate(grad->w_out, p, h_top);
    for (std::size_t v = 0; v < p.size(); ++v) grad->b_out[v] += p[v];
    matvec_transposed_accumulate(model.w_out, p, dh_in[nl - 1][t]);
  }
  if (!grad) return loss;

  const Vector zeros(hdim, 0.0);
  Vector da(4 * hdim);
  for (std::size_t li = nl; li-- > 0;) {
    const LstmLm::Layer& layer = model.layers[li];
    LstmLm::Layer& g_layer = grad->layers[li];
    Vector dh_next(hdim, 0.0), dc_next(hdim, 0.0);
    for (std::size_t t = n; t-- > 0;) {
      const LayerState& st = trace.steps[t].layers[li];
      const Vector& c_prev = t > 0 ? trace.steps[t - 1].layers[li].c : zeros;
      const Vector& h_prev = t > 0 ? trace.steps[t - 1].layers[li].h : zeros;
      for (std::size_t j = 0; j < hdim; ++j) {
        const double dh = dh_in[li][t][j] + dh_next[j];
        const double tc = std::tanh(st.c[j]);
        const double d_o = dh * tc;
        const double dc = dc_next[j] + dh * st.o[j] * (1.0 - tc * tc);
        const double di = dc * st.g[j];
        const double dg = dc * st.i[j];
        const double df = dc * c_prev[j];
        dc_next[j] = dc * st.f[j];
        da[j] = di * st.i[j] * (1.0 - st.i[j]);
        da[hdim + j] = df * st.f[j] * (1.0 - st.f[j]);
        da[2 * hdim + j] = dg * (1.0 - st.g[j] * st.g[j]);
        da[3 * hdim + j] = d_o * st.o[j] * (1.0 - st.o[j]);
      }
      std::span<const double> x =
          li == 0 ? model.embedding.row(static_cast<std::size_t>(tokens[t]))
                  : std::span<const double>(trace.steps[t].layers[li - 1].h);
      outer_accumulate(g_layer.w_input, da, x);
      outer_accumulate(g_layer.w_recurrent, da, h_prev);
      for (std::size_t j = 0; j < da.size(); ++j) g_layer.bias[j] += da[j];
      if (li > 0) {
        matvec_transposed_accumulate(layer.w_input, da, dh_in[li - 1][t]);
      } else {
        matvec_transposed_accumulate(layer.w_input, da,
                                     grad->embedding.row(static_cast<std::size_t>(tokens[t])));
      }
      std::fill(dh_next.begin(), dh_next.end(), 0.0);
      matvec_transposed_accumulate(layer.w_recurrent, da, dh_next);
    }
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Training

std::string_view to_string(Optimizer o) noexcept { return o == Optimizer::Sgd ? "sgd" : "adam"; }

Optimizer parse_optimizer(std::string_view s) {
  if (s == "sgd") return Optimizer::Sgd;
  if (s == "adam") return Optimizer::Adam;
  throw ParseError("optimizer must be 'sgd' or 'adam', got '" + std::string(s) + "'", 0,
                   "optimizer");
}

TrainLog train_lm(LstmLm& model, const std::vector<std::vector<int>>& sentences,
                  const TrainHyper& hyper, int end_token) {
  if (hyper.epochs < 0) throw Error("epochs must be non-negative");
  if (hyper.batch_size == 0) throw Error("batch_size must be positive");
  for (const auto& s : sentences) {
    for (int t : s) {
      if (t < 0 || static_cast<std::size_t>(t) >= model.dims().vocab) {
        throw DimensionError("training token " + std::to_string(t) + " outside model vocabulary");
      }
    }
  }
  TrainLog log;
  LstmLm grad(model.dims());
  const std::size_t count = model.parameter_count();
  Vector adam_m, adam_v;
  if (hyper.optimizer == Optimizer::Adam) {
    adam_m.assign(count, 0.0);
    adam_v.assign(count, 0.0);
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  std::uint64_t adam_t = 0;

  std::vector<std::size_t> order(sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(hyper.seed, "train-lm-shuffle"));

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t stop = std::min(order.size(), start + hyper.batch_size);
      grad.zero();
      double batch_loss = 0.0;
      std::size_t batch_tokens = 0;
      for (std::size_t b = start; b < stop; ++b) {
        const auto& s = sentences[order[b]];
        if (s.empty()) continue;
        batch_loss += sentence_loss(model, s, end_token, &grad);
        batch_tokens += s.size();
      }
      if (batch_tokens == 0) continue;
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch + 1) +
                           " (learning rate " + std::to_string(hyper.lr) + " too high?)");
      }
      epoch_loss += batch_loss;
      epoch_tokens += batch_tokens;

      const double scale = 1.0 / static_cast<double>(batch_tokens);
      double norm2 = 0.0;
      for (auto blk : grad.blocks()) {
        for (double& g : blk) {
          g *= scale;
          norm2 += g * g;
        }
      }
      if (hyper.clip > 0.0) {
        const double norm = std::sqrt(norm2);
        if (norm > hyper.clip) {
          const double shrink = hyper.clip / norm;
          for (auto blk : grad.blocks()) {
            for (double& g : blk) g *= shrink;
          }
        }
      }

      auto params = model.blocks();
      auto grads = grad.blocks();
      if (hyper.optimizer == Optimizer::Sgd) {
        for (std::size_t bi = 0; bi < params.size(); ++bi) {
          for (std::size_t j = 0; j < params[bi].size(); ++j) params[bi][j] -= hyper.lr * grads[bi][j];
        }
      } else {
        ++adam_t;
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam_t));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam_t));
        std::size_t k = 0;
        for (std::size_t bi = 0; bi < params.size(); ++bi) {
          for (std::size_t j = 0; j < params[bi].size(); ++j, ++k) {
            const double g = grads[bi][j];
            adam_m[k] = kBeta1 * adam_m[k] + (1.0 - kBeta1) * g;
            adam_v[k] = kBeta2 * adam_v[k] + (1.0 - kBeta2) * g * g;
            params[bi][j] -= hyper.lr * (adam_m[k] / c1) / (std::sqrt(adam_v[k] / c2) + kEps);
          }
        }
      }
    }
    log.epoch_loss.push_back(epoch_tokens ? epoch_loss / static_cast<double>(epoch_tokens) : 0.0);
  }
  if (!model.all_finite()) throw NumericError("training produced non-finite parameters");
  model.round_to_float();
  return log;
}

TrainLog train_lm(LstmLm& model, const Corpus& corpus, const TrainHyper& hyper, int end_token) {
  std::vector<std::vector<int>> sentences;
  sentences.reserve(corpus.size());
  for (const auto& s : corpus) sentences.push_back(s.tokens);
  return train_lm(model, sentences, hyper, end_token);
}

// ---------------------------------------------------------------------------
// Evaluation

Vector word_log_probs(const LstmLm&, const ActivationTrace& trace, std::span<const int> tokens,
                      int end_token) {
  if (trace.size() != tokens.size()) throw DimensionError("trace and token lengths differ");
  Vector out(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const int target = t + 1 < tokens.size() ? tokens[t + 1] : end_token;
    out[t] = trace.logits[t][static_cast<std::size_t>(target)] - log_sum_exp(trace.logits[t]);
  }
  return out;
}

PerplexityResult perplexity(const LstmLm& model, const std::vector<std::vector<int>>& sentences,
                            int end_token) {
  if (sentences.empty()) throw Error("perplexity: empty corpus");
  PerplexityResult r;
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& s : sentences) {
    const ActivationTrace trace = forward(model, s);
    Vector lp = word_log_probs(model, trace, s, end_token);
    for (double v : lp) total += v;
    count += lp.size();
    r.log_probs.push_back(std::move(lp));
  }
  r.perplexity = std::exp(-total / static_cast<double>(count));
  return r;
}

bool prefers_correct(const Vector& logits_before_verb, const AgreementSentence& s) {
  return logits_before_verb.at(static_cast<std::size_t>(s.correct_verb)) >
         logits_before_verb.at(static_cast<std::size_t>(s.incorrect_verb));
}

bool agreement_prefers_correct(const LstmLm& model, const AgreementSentence& s) {
  if (s.verb_idx < 1 || s.verb_idx > s.length()) throw DimensionError("verb_idx outside sentence");
  const std::span<const int> prefix(s.tokens.data(), static_cast<std::size_t>(s.verb_idx));
  StepState state = initial_state(model);
  for (int tok : prefix) state = step(model, tok, state);
  return prefers_correct(output_logits(model, state), s);
}

AgreementResult agreement_accuracy(const LstmLm& model, const Corpus& testset) {
  if (testset.empty()) throw Error("agreement_accuracy: empty test set");
  AgreementResult r;
  r.outcomes.reserve(testset.size());
  std::size_t hits = 0;
  for (const auto& s : testset) {
    const bool ok = agreement_prefers_correct(model, s);
    r.outcomes.push_back(ok);
    hits += ok ? 1 : 0;
  }
  r.accuracy = static_cast<double>(hits) / static_cast<double>(testset.size());
  return r;
}

}  // namespace agp
