// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace agp {

// Id of the sentence-end token in every Vocab.
inline constexpr int kEndToken = 0;

enum class Number : unsigned char { Singular, Plural };

constexpr Number opposite(Number n) noexcept {
  return n == Number::Singular ? Number::Plural : Number::Singular;
}

std::string_view to_string(Number n) noexcept;  // "SG" / "PL"
Number parse_number(std::string_view s);         // throws ParseError

enum class WordClass : unsigned char {
  Noun,
  Verb,
  Determiner,
  Preposition,
  Adjective,
  Adverb,
  Other,
  End,
  Unknown,
};

std::string_view to_string(WordClass c) noexcept;

struct WordInfo {
  WordClass word_class = WordClass::Unknown;
  std::optional<Number> number;  // nouns and verbs only
  int pair = -1;                 // index of the noun/verb pair
};

// Closed vocabulary with word-class annotations. Ids are dense; the
// sentence-end token is id 0 and the unknown token id 1.
//
// Word-class file format, one entry per line, '#' starts a comment:
//   noun <singular> <plural>
//   verb <singular> <plural>
//   det|prep|adj|adv|other <word>
class Vocab {
 public:
  static constexpr std::string_view kEnd = "<eos>";
  static constexpr std::string_view kUnknown = "<unk>";

  Vocab();

  static const Vocab& builtin();
  static Vocab load(const std::string& path);
  static Vocab parse(std::string_view text);

  std::size_t size() const noexcept { return words_.size(); }
  int end_id() const noexcept { return 0; }
  int unknown_id() const noexcept { return 1; }

  std::optional<int> find(std::string_view word) const;
  // Unknown words map to unknown_id().
  int id(std::string_view word) const;
  const std::string& word(int id) const;
  const WordInfo& info(int id) const;

  std::size_t noun_pairs() const noexcept { return nouns_.size(); }
  std::size_t verb_pairs() const noexcept { return verbs_.size(); }
  int noun(std::size_t pair, Number n) const;
  int verb(std::size_t pair, Number n) const;

  // Opposite-number form of a noun or verb id; throws for other classes.
  int opposite_form(int id) const;

  // Ids of a class, restricted to a number when given.
  const std::vector<int>& members(WordClass c, std::optional<Number> n = std::nullopt) const;

  void add_pair(WordClass c, std::string_view singular, std::string_view plural);
  void add_word(WordClass c, std::string_view word);

  std::string to_text() const;

 private:
  int insert(std::string_view word, WordInfo info);
  static std::size_t bucket(WordClass c, std::optional<Number> n);

  std::vector<std::string> words_;
  std::vector<WordInfo> infos_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::pair<int, int>> nouns_;
  std::vector<std::pair<int, int>> verbs_;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace agp
