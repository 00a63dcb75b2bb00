// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "agp/numerics.hpp"
#include "agp/vocab.hpp"

namespace agp {

// One subject-verb agreement item. Offsets are relative to subject_idx.
struct AgreementSentence {
  std::vector<int> tokens;
  int subject_idx = 0;
  int verb_idx = 1;
  Number number = Number::Singular;
  int correct_verb = -1;
  int incorrect_verb = -1;
  std::vector<int> attractor_offsets;
  std::vector<int> helpful_offsets;
  int k = 0;  // tokens before the subject
  int l = 0;  // context size: verb_idx - subject_idx - 1
  int m = 0;  // tokens after the verb

  int length() const noexcept { return static_cast<int>(tokens.size()); }
  bool operator==(const AgreementSentence&) const = default;
};

using Corpus = std::vector<AgreementSentence>;

// Count restriction for k, l or m.
struct CountConstraint {
  enum class Kind { Any, Exact, AtLeast };
  Kind kind = Kind::Any;
  int value = 0;

  static CountConstraint any() { return {}; }
  static CountConstraint exact(int v) { return {Kind::Exact, v}; }
  static CountConstraint at_least(int v) { return {Kind::AtLeast, v}; }

  bool admits(int v) const noexcept;
  bool operator==(const CountConstraint&) const = default;
};

struct AttractorConstraint {
  enum class Kind { Any, None, At };
  Kind kind = Kind::Any;
  int offset = 0;

  static AttractorConstraint any() { return {}; }
  static AttractorConstraint none() { return {Kind::None, 0}; }
  static AttractorConstraint at(int o) { return {Kind::At, o}; }
  bool operator==(const AttractorConstraint&) const = default;
};

// Dataset constraints in WD notation:
//
//   WD-K<k>-L<l>-M<m>-A<a>[-NH]
//
// K and M take "n" (exactly n), "n+" (at least n) or "*". L takes "n" or
// "*". A takes "n" (exactly one attractor, at offset n from the subject),
// "-" (no attractor) or "*". The optional "-NH" suffix forbids helpful
// nouns, i.e. context nouns sharing the subject's number.
struct ConstraintSpec {
  CountConstraint k;
  CountConstraint l;
  CountConstraint m;
  AttractorConstraint a;
  bool forbid_helpful = false;

  static ConstraintSpec wildcard() { return {}; }
  static ConstraintSpec parse(std::string_view wd);
  std::string format() const;

  // Throws ConstraintError when the spec contradicts itself.
  void check() const;
  bool admits(const AgreementSentence& s) const;
  bool operator==(const ConstraintSpec&) const = default;
};

struct Violation {
  std::string field;
  std::string message;
};

std::vector<Violation> validate_sentence(const AgreementSentence& s, const Vocab& vocab);

// Recomputes k, l, m, attractor and helpful offsets from the token sequence,
// subject and verb positions.
AgreementSentence annotate(std::vector<int> tokens, int subject_idx, int verb_idx,
                           const Vocab& vocab);

// Draws the subject number uniformly.
AgreementSentence generate_sentence(const ConstraintSpec& spec, const Vocab& vocab, Rng& rng);
AgreementSentence generate_sentence(const ConstraintSpec& spec, const Vocab& vocab, Rng& rng,
                                    Number number);

// n sentences with subject numbers alternating Singular, Plural, ...
Corpus generate_corpus(const ConstraintSpec& spec, std::size_t n, const Vocab& vocab, Rng& rng);

Corpus filter_corpus(const Corpus& corpus, const ConstraintSpec& spec);

std::vector<int> swap_verb_number(const AgreementSentence& s);

std::vector<AgreementSentence> nonce_variants(const AgreementSentence& s, std::size_t n,
                                              const Vocab& vocab, Rng& rng);

// Sentences of corpus whose token sequence does not occur in other.
Corpus remove_overlap(const Corpus& corpus, const Corpus& other);

// Downsample the majority subject number so both numbers are equally frequent.
// Input order is kept.
Corpus balance_numbers(const Corpus& corpus, Rng& rng);

std::string join_tokens(const std::vector<int>& tokens, const Vocab& vocab);

// TSV exchange format. Columns, tab separated, with a header row:
//   tokens subject_idx verb_idx number correct_verb incorrect_verb
//   attractor_offsets helpful_offsets k l m
Corpus read_tsv(const std::string& path, const Vocab& vocab);
Corpus parse_tsv(std::string_view text, const Vocab& vocab);
void write_tsv(const Corpus& corpus, const std::string& path, const Vocab& vocab);
std::string format_tsv(const Corpus& corpus, const Vocab& vocab);

}  // namespace agp
