// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "agp/corpus.hpp"
#include "agp/numerics.hpp"

namespace agp {

// Stored LSTM quantities a probe can read.
enum class Kind : unsigned char { H, C, F, I, O };

struct ComponentId {
  int layer = 0;
  Kind kind = Kind::H;

  // All 10 components, layer-major: h0 c0 f0 i0 o0 h1 c1 f1 i1 o1.
  static const std::array<ComponentId, 10>& all();
  static ComponentId parse(std::string_view name);  // "h0", "c1", ...
  std::string name() const;
  int index() const noexcept { return layer * 5 + static_cast<int>(kind); }

  auto operator<=>(const ComponentId&) const = default;
};

struct LayerState {
  Vector h, c, f, i, o, g;

  explicit LayerState(std::size_t hidden = 0)
      : h(hidden), c(hidden), f(hidden), i(hidden), o(hidden), g(hidden) {}
  const Vector& get(Kind k) const;
  Vector& get(Kind k);
  bool operator==(const LayerState&) const = default;
};

struct StepState {
  std::vector<LayerState> layers;

  const Vector& component(ComponentId id) const { return layers.at(id.layer).get(id.kind); }
  Vector& component(ComponentId id) { return layers.at(id.layer).get(id.kind); }
  bool operator==(const StepState&) const = default;
};

struct ActivationTrace {
  std::vector<StepState> steps;
  std::vector<Vector> logits;  // logits[t] predicts the token after position t

  std::size_t size() const noexcept { return steps.size(); }
  bool operator==(const ActivationTrace&) const = default;
};

// Two-layer LSTM language model. Each layer packs its four gate blocks in the
// order (i, f, g, o): rows [0,H) input gate, [H,2H) forget gate, [2H,3H)
// candidate, [3H,4H) output gate.
class LstmLm {
 public:
  struct Dims {
    std::size_t vocab = 0;
    std::size_t embed = 32;
    std::size_t hidden = 64;
    std::size_t layers = 2;
    bool operator==(const Dims&) const = default;
  };

  struct Layer {
    Matrix w_input;      // 4H x input-dim
    Matrix w_recurrent;  // 4H x H
    Vector bias;         // 4H
    bool operator==(const Layer&) const = default;
  };

  LstmLm() = default;
  // All parameters zero.
  explicit LstmLm(Dims dims);

  // Uniform(-1/sqrt(H), 1/sqrt(H)) weights, forget-gate bias +1, rounded to
  // 32-bit so that checkpoints are lossless.
  static LstmLm initialized(Dims dims, std::uint64_t seed);

  const Dims& dims() const noexcept { return dims_; }

  Matrix embedding;  // V x E
  std::vector<Layer> layers;
  Matrix w_out;  // V x H
  Vector b_out;  // V

  // Parameter blocks in checkpoint order: embedding, then per layer
  // w_input, w_recurrent, bias, then w_out, b_out. All row-major.
  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;
  std::size_t parameter_count() const;
  Vector flatten() const;
  void assign(std::span<const double> flat);

  void round_to_float();
  void zero();
  bool all_finite() const;

  bool operator==(const LstmLm&) const = default;

 private:
  Dims dims_{};
};

// One LSTM cell update. x has the layer's input dimension.
LayerState lstm_step(const LstmLm::Layer& layer, std::span<const double> x, const LayerState& prev);

StepState initial_state(const LstmLm& model);
// Consumes one token through both layers.
StepState step(const LstmLm& model, int token, const StepState& prev);
Vector output_logits(const LstmLm& model, const StepState& state);

ActivationTrace forward(const LstmLm& model, std::span<const int> tokens);

// Summed next-token cross-entropy of one sentence (targets tokens[1..n-1] and
// the end token) and, when grad is non-null, its gradient accumulated into
// grad by backpropagation through time. grad must have model's dims.
double sentence_loss(const LstmLm& model, std::span<const int> tokens, int end_token,
                     LstmLm* grad = nullptr);

enum class Optimizer { Sgd, Adam };

std::string_view to_string(Optimizer o) noexcept;
Optimizer parse_optimizer(std::string_view s);

struct TrainHyper {
  double lr = 0.005;
  int epochs = 6;
  double clip = 5.0;  // global gradient-norm clip per batch; <= 0 disables
  std::uint64_t seed = 1;
  std::size_t batch_size = 16;
  Optimizer optimizer = Optimizer::Adam;
};

struct TrainLog {
  std::vector<double> epoch_loss;  // mean per-token cross-entropy
};

// Throws NumericError when the loss becomes non-finite.
TrainLog train_lm(LstmLm& model, const std::vector<std::vector<int>>& sentences,
                  const TrainHyper& hyper, int end_token);
TrainLog train_lm(LstmLm& model, const Corpus& corpus, const TrainHyper& hyper, int end_token);

struct PerplexityResult {
  double perplexity = 0.0;
  // log_probs[s][t]: natural-log probability of the token following
  // position t of sentence s (the end token after the last position).
  std::vector<Vector> log_probs;
};

PerplexityResult perplexity(const LstmLm& model, const std::vector<std::vector<int>>& sentences,
                            int end_token);
Vector word_log_probs(const LstmLm& model, const ActivationTrace& trace,
                      std::span<const int> tokens, int end_token);

// Compares the logits (equivalently, probabilities) of the two verb forms
// given tokens[0..verb_idx-1]. Ties are not a preference.
bool agreement_prefers_correct(const LstmLm& model, const AgreementSentence& s);
bool prefers_correct(const Vector& logits_before_verb, const AgreementSentence& s);

struct AgreementResult {
  double accuracy = 0.0;
  std::vector<bool> outcomes;
};

AgreementResult agreement_accuracy(const LstmLm& model, const Corpus& testset);

// Little-endian: "AGPR", u32 version, u32 V, E, H, layers, 4-byte gate
// order "IFGO", parameter blocks as f32 in blocks() order, u32 CRC-32 of
// everything after the magic.
void save_checkpoint(const LstmLm& model, const std::string& path);
LstmLm load_checkpoint(const std::string& path);
std::vector<unsigned char> encode_checkpoint(const LstmLm& model);
LstmLm decode_checkpoint(std::span<const unsigned char> bytes);

}  // namespace agp
