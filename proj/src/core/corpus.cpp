// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#include "agp/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "agp/error.hpp"

namespace agp {

bool CountConstraint::admits(int v) const noexcept {
  switch (kind) {
    case Kind::Any: return true;
    case Kind::Exact: return v == value;
    case Kind::AtLeast: return v >= value;
  }
  return false;
}

// ---------------------------------------------------------------------------
// WD notation

namespace {

class SpecParser {
 public:
  explicit SpecParser(std::string_view s) : s_(s) {}

  ConstraintSpec parse() {
    ConstraintSpec spec;
    expect("WD-", "prefix");
    expect("K", "k");
    spec.k = count("k", true);
    expect("-", "k");
    expect("L", "l");
    spec.l = count("l", false);
    expect("-", "l");
    expect("M", "m");
    spec.m = count("m", true);
    expect("-", "m");
    expect("A", "a");
    spec.a = attractor();
    if (pos_ < s_.size()) {
      expect("-NH", "suffix");
      spec.forbid_helpful = true;
    }
    if (pos_ != s_.size()) fail("unexpected trailing characters", "suffix");
    return spec;
  }

 private:
  [[noreturn]] void fail(const std::string& what, const std::string& field) {
    throw ParseError("invalid WD spec '" + std::string(s_) + "' at position " +
                         std::to_string(pos_) + ": " + what,
                     0, field, pos_);
  }

  void expect(std::string_view lit, const std::string& field) {
    if (s_.substr(pos_, lit.size()) != lit) fail("expected '" + std::string(lit) + "'", field);
    pos_ += lit.size();
  }

  bool digits(int& out) {
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr == begin) return false;
    pos_ += static_cast<std::size_t>(ptr - begin);
    return true;
  }

  CountConstraint count(const std::string& field, bool allow_min) {
    if (pos_ < s_.size() && s_[pos_] == '*') {
      ++pos_;
      return CountConstraint::any();
    }
    int v = 0;
    if (pos_ >= s_.size() || s_[pos_] < '0' || s_[pos_] > '9' || !digits(v)) {
      fail("expected a count or '*'", field);
    }
    if (allow_min && pos_ < s_.size() && s_[pos_] == '+') {
      ++pos_;
      return CountConstraint::at_least(v);
    }
    return CountConstraint::exact(v);
  }

  AttractorConstraint attractor() {
    if (pos_ < s_.size() && s_[pos_] == '*') {
      ++pos_;
      return AttractorConstraint::any();
    }
    if (pos_ < s_.size() && s_[pos_] == '-') {
      ++pos_;
      return AttractorConstraint::none();
    }
    if (s_.substr(pos_, 3) == "\xE2\x88\x92") {  // U+2212 minus sign
      pos_ += 3;
      return AttractorConstraint::none();
    }
    int v = 0;
    if (pos_ >= s_.size() || s_[pos_] < '0' || s_[pos_] > '9' || !digits(v)) {
      fail("expected an offset, '-' or '*'", "a");
    }
    return AttractorConstraint::at(v);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string format_count(const CountConstraint& c) {
  switch (c.kind) {
    case CountConstraint::Kind::Any: return "*";
    case CountConstraint::Kind::Exact: return std::to_string(c.value);
    case CountConstraint::Kind::AtLeast: return std::to_string(c.value) + "+";
  }
  return "*";
}

}  // namespace

ConstraintSpec ConstraintSpec::parse(std::string_view wd) {
  ConstraintSpec spec = SpecParser(wd).parse();
  spec.check();
  return spec;
}

std::string ConstraintSpec::format() const {
  std::string out = "WD-K" + format_count(k) + "-L" + format_count(l) + "-M" + format_count(m) + "-A";
  switch (a.kind) {
    case AttractorConstraint::Kind::Any: out += "*"; break;
    case AttractorConstraint::Kind::None: out += "-"; break;
    case AttractorConstraint::Kind::At: out += std::to_string(a.offset); break;
  }
  if (forbid_helpful) out += "-NH";
  return out;
}

void ConstraintSpec::check() const {
  if (k.kind != CountConstraint::Kind::Any && k.value < 0) throw ConstraintError("k", "negative");
  if (m.kind != CountConstraint::Kind::Any && m.value < 0) throw ConstraintError("m", "negative");
  if (l.kind == CountConstraint::Kind::AtLeast) {
    throw ConstraintError("l", "context size must be exact or '*'");
  }
  if (l.kind == CountConstraint::Kind::Exact && l.value < 0) throw ConstraintError("l", "negative");
  if (a.kind == AttractorConstraint::Kind::At) {
    if (a.offset < 1) throw ConstraintError("a", "attractor offset must be at least 1");
    if (l.kind == CountConstraint::Kind::Exact && a.offset > l.value) {
      throw ConstraintError("a", "attractor offset " + std::to_string(a.offset) +
                                     " exceeds context size " + std::to_string(l.value));
    }
  }
}

bool ConstraintSpec::admits(const AgreementSentence& s) const {
  if (!k.admits(s.k) || !l.admits(s.l) || !m.admits(s.m)) return false;
  switch (a.kind) {
    case AttractorConstraint::Kind::Any: break;
    case AttractorConstraint::Kind::None:
      if (!s.attractor_offsets.empty()) return false;
      break;
    case AttractorConstraint::Kind::At:
      if (s.attractor_offsets.size() != 1 || s.attractor_offsets.front() != a.offset) return false;
      break;
  }
  if (forbid_helpful && !s.helpful_offsets.empty()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Violation> validate_sentence(const AgreementSentence& s, const Vocab& vocab) {
  std::vector<Violation> out;
  auto add = [&](std::string field, std::string msg) {
    out.push_back(Violation{std::move(field), std::move(msg)});
  };
  const int n = s.length();
  if (s.subject_idx < 0 || s.subject_idx >= n) {
    add("subject_idx", "subject index " + std::to_string(s.subject_idx) + " outside sentence");
  }
  if (s.verb_idx <= s.subject_idx || s.verb_idx >= n) {
    add("verb_idx", "verb index " + std::to_string(s.verb_idx) +
                        " must follow the subject and lie inside the sentence");
  }
  if (!out.empty()) return out;

  for (int t : s.tokens) {
    if (t < 0 || static_cast<std::size_t>(t) >= vocab.size()) {
      add("tokens", "token id " + std::to_string(t) + " outside vocabulary");
      return out;
    }
  }
  if (s.k != s.subject_idx) add("k", "k must equal subject_idx");
  if (s.l != s.verb_idx - s.subject_idx - 1) add("l", "l must equal verb_idx - subject_idx - 1");
  if (s.m != n - s.verb_idx - 1) add("m", "m must equal the number of tokens after the verb");

  const WordInfo& subj = vocab.info(s.tokens[s.subject_idx]);
  if (subj.word_class != WordClass::Noun) {
    add("subject_idx", "subject token '" + vocab.word(s.tokens[s.subject_idx]) + "' is not a noun");
  } else if (subj.number != s.number) {
    add("number", "subject head has number " + std::string(to_string(*subj.number)));
  }

  if (s.tokens[s.verb_idx] != s.correct_verb) {
    add("correct_verb", "token at verb_idx differs from correct_verb");
  }
  if (s.correct_verb < 0 || static_cast<std::size_t>(s.correct_verb) >= vocab.size() ||
      vocab.info(s.correct_verb).word_class != WordClass::Verb) {
    add("correct_verb", "correct_verb is not a verb");
  } else {
    if (vocab.info(s.correct_verb).number != s.number) {
      add("correct_verb", "correct_verb does not carry the subject's number");
    }
    if (s.incorrect_verb != vocab.opposite_form(s.correct_verb)) {
      add("incorrect_verb", "incorrect_verb is not the opposite-number form of correct_verb");
    }
  }

  auto check_offsets = [&](const std::vector<int>& offsets, const std::string& field,
                           Number expected) {
    std::set<int> seen;
    for (int o : offsets) {
      if (!seen.insert(o).second) {
        add(field, "duplicate offset " + std::to_string(o));
        continue;
      }
      if (o < 1 || o > s.l) {
        add(field, "offset " + std::to_string(o) + " outside the context");
        continue;
      }
      const WordInfo& wi = vocab.info(s.tokens[s.subject_idx + o]);
      if (wi.word_class != WordClass::Noun || wi.number != expected) {
        add(field, "offset " + std::to_string(o) + " does not name a " +
                       std::string(to_string(expected)) + " noun");
      }
    }
  };
  check_offsets(s.attractor_offsets, "attractor_offsets", opposite(s.number));
  check_offsets(s.helpful_offsets, "helpful_offsets", s.number);

  for (int o = 1; o <= s.l; ++o) {
    const WordInfo& wi = vocab.info(s.tokens[s.subject_idx + o]);
    if (wi.word_class != WordClass::Noun) continue;
    const bool listed =
        std::count(s.attractor_offsets.begin(), s.attractor_offsets.end(), o) +
            std::count(s.helpful_offsets.begin(), s.helpful_offsets.end(), o) >
        0;
    if (!listed) {
      add(*wi.number == s.number ? "helpful_offsets" : "attractor_offsets",
          "context noun at offset " + std::to_string(o) + " is not annotated");
    }
  }
  return out;
}

AgreementSentence annotate(std::vector<int> tokens, int subject_idx, int verb_idx,
                           const Vocab& vocab) {
  AgreementSentence s;
  s.tokens = std::move(tokens);
  s.subject_idx = subject_idx;
  s.verb_idx = verb_idx;
  const int n = s.length();
  if (subject_idx < 0 || verb_idx <= subject_idx || verb_idx >= n) {
    throw ConstraintError("verb_idx", "subject and verb positions do not fit the sentence");
  }
  const WordInfo& subj = vocab.info(s.tokens[subject_idx]);
  if (subj.word_class != WordClass::Noun) throw ConstraintError("subject_idx", "not a noun");
  s.number = *subj.number;
  s.correct_verb = s.tokens[verb_idx];
  s.incorrect_verb = vocab.opposite_form(s.correct_verb);
  s.k = subject_idx;
  s.l = verb_idx - subject_idx - 1;
  s.m = n - verb_idx - 1;
  for (int o = 1; o <= s.l; ++o) {
    const WordInfo& wi = vocab.info(s.tokens[subject_idx + o]);
    if (wi.word_class != WordClass::Noun) continue;
    (wi.number == s.number ? s.helpful_offsets : s.attractor_offsets).push_back(o);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Template grammar
//
//   sentence  := prefix(k) SUBJECT context(l) VERB suffix(m)
//   prefix    := ADV* DET ADJ*
//   context   := (PP | ADV)*
//   PP        := PREP NOUN | PREP DET NOUN | PREP DET ADJ NOUN
//   suffix    := ADV | DET [ADJ] NOUN (PP | ADV)*

namespace {

enum class NounPolicy { NoNouns, Same, Opposite, Random };

class TemplateBuilder {
 public:
  TemplateBuilder(const Vocab& vocab, Rng& rng, Number subject)
      : vocab_(vocab), rng_(rng), subject_(subject) {}

  std::vector<int>& tokens() { return tokens_; }

  int pick(WordClass c, std::optional<Number> n = std::nullopt) {
    const auto& pool = vocab_.members(c, n);
    if (pool.empty()) {
      throw ConstraintError("vocab", "vocabulary has no " + std::string(to_string(c)) + " words");
    }
    return pool[rng_.below(pool.size())];
  }

  void push(WordClass c, std::optional<Number> n = std::nullopt) { tokens_.push_back(pick(c, n)); }

  Number noun_number(NounPolicy p) {
    switch (p) {
      case NounPolicy::Same: return subject_;
      case NounPolicy::Opposite: return opposite(subject_);
      default: return rng_.coin() ? Number::Plural : Number::Singular;
    }
  }

  void pp(int len, Number noun) {
    push(WordClass::Preposition);
    if (len >= 3) push(WordClass::Determiner);
    for (int i = 4; i <= len; ++i) push(WordClass::Adjective);
    push(WordClass::Noun, noun);
  }

  void fill(int len, NounPolicy policy) {
    while (len > 0) {
      if (policy == NounPolicy::NoNouns || len == 1) {
        push(WordClass::Adverb);
        --len;
        continue;
      }
      // weights: adverb 1, PP2 1, PP3 3, PP4 1
      std::vector<std::pair<int, int>> options{{1, 1}, {2, 1}};
      if (len >= 3) options.push_back({3, 3});
      if (len >= 4) options.push_back({4, 1});
      int total = 0;
      for (auto& o : options) total += o.second;
      int r = static_cast<int>(rng_.below(static_cast<std::size_t>(total)));
      int choice = options.back().first;
      for (auto& o : options) {
        if (r < o.second) {
          choice = o.first;
          break;
        }
        r -= o.second;
      }
      if (choice == 1) {
        push(WordClass::Adverb);
      } else {
        pp(choice, noun_number(policy));
      }
      len -= choice;
    }
  }

  // Exactly len tokens whose last token is a noun of the given number.
  void fill_ending_in_noun(int len, Number noun, NounPolicy filler) {
    std::vector<int> sizes;
    for (int p = 2; p <= std::min(len, 4); ++p) {
      sizes.push_back(p);
      if (p == 3) sizes.push_back(p);
    }
    const int p = sizes[rng_.below(sizes.size())];
    fill(len - p, filler);
    pp(p, noun);
  }

  void prefix(int k) {
    if (k == 0) return;
    const int adjs = static_cast<int>(rng_.below(static_cast<std::size_t>(std::min(k - 1, 2) + 1)));
    for (int i = 0; i < k - 1 - adjs; ++i) push(WordClass::Adverb);
    push(WordClass::Determiner);
    for (int i = 0; i < adjs; ++i) push(WordClass::Adjective);
  }

  void suffix(int m) {
    if (m == 0) return;
    if (m == 1) {
      push(WordClass::Adverb);
      return;
    }
    push(WordClass::Determiner);
    int used = 2;
    if (m >= 3 && rng_.coin()) {
      push(WordClass::Adjective);
      ++used;
    }
    push(WordClass::Noun, noun_number(NounPolicy::Random));
    fill(m - used, NounPolicy::Random);
  }

 private:
  const Vocab& vocab_;
  Rng& rng_;
  Number subject_;
  std::vector<int> tokens_;
};

int sample_count(const CountConstraint& c, int any_lo, int any_hi, Rng& rng) {
  switch (c.kind) {
    case CountConstraint::Kind::Exact: return c.value;
    case CountConstraint::Kind::AtLeast: return c.value + static_cast<int>(rng.below(3));
    case CountConstraint::Kind::Any: break;
  }
  return any_lo + static_cast<int>(rng.below(static_cast<std::size_t>(any_hi - any_lo + 1)));
}

}  // namespace

AgreementSentence generate_sentence(const ConstraintSpec& spec, const Vocab& vocab, Rng& rng) {
  return generate_sentence(spec, vocab, rng, rng.coin() ? Number::Plural : Number::Singular);
}

AgreementSentence generate_sentence(const ConstraintSpec& spec, const Vocab& vocab, Rng& rng,
                                    Number number) {
  spec.check();
  const bool at = spec.a.kind == AttractorConstraint::Kind::At;
  if (at && spec.a.offset < 2) {
    throw ConstraintError("a", "attractor offset " + std::to_string(spec.a.offset) +
                                   " cannot hold a noun: the shortest modifier is 'prep noun'");
  }
  if (vocab.noun_pairs() == 0 || vocab.verb_pairs() == 0) {
    throw ConstraintError("vocab", "vocabulary needs at least one noun pair and one verb pair");
  }

  const int k = sample_count(spec.k, 0, 2, rng);
  const int l = at ? sample_count(spec.l, spec.a.offset, spec.a.offset + 3, rng)
                   : sample_count(spec.l, 0, 7, rng);
  const int m = sample_count(spec.m, 0, 2, rng);

  TemplateBuilder b(vocab, rng, number);
  b.prefix(k);
  const int subject_idx = static_cast<int>(b.tokens().size());
  b.push(WordClass::Noun, number);

  NounPolicy filler;
  switch (spec.a.kind) {
    case AttractorConstraint::Kind::Any:
      filler = spec.forbid_helpful ? NounPolicy::Opposite : NounPolicy::Random;
      break;
    default:
      filler = spec.forbid_helpful ? NounPolicy::NoNouns : NounPolicy::Same;
      break;
  }
  if (at) {
    b.fill_ending_in_noun(spec.a.offset, opposite(number), filler);
    b.fill(l - spec.a.offset, filler);
  } else {
    b.fill(l, filler);
  }

  const int verb_idx = static_cast<int>(b.tokens().size());
  b.push(WordClass::Verb, number);
  b.suffix(m);

  AgreementSentence s = annotate(std::move(b.tokens()), subject_idx, verb_idx, vocab);
  if (!spec.admits(s)) {
    throw Error("generator produced a sentence outside " + spec.format());
  }
  return s;
}

Corpus generate_corpus(const ConstraintSpec& spec, std::size_t n, const Vocab& vocab, Rng& rng) {
  Corpus out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(
        generate_sentence(spec, vocab, rng, i % 2 == 0 ? Number::Singular : Number::Plural));
  }
  return out;
}

Corpus filter_corpus(const Corpus& corpus, const ConstraintSpec& spec) {
  Corpus out;
  std::copy_if(corpus.begin(), corpus.end(), std::back_inserter(out),
               [&](const AgreementSentence& s) { return spec.admits(s); });
  return out;
}

std::vector<int> swap_verb_number(const AgreementSentence& s) {
  std::vector<int> out = s.tokens;
  out.at(static_cast<std::size_t>(s.verb_idx)) =
      s.tokens[s.verb_idx] == s.correct_verb ? s.incorrect_verb : s.correct_verb;
  return out;
}

std::vector<AgreementSentence> nonce_variants(const AgreementSentence& s, std::size_t n,
                                              const Vocab& vocab, Rng& rng) {
  std::vector<AgreementSentence> out;
  if (n == 0) return out;
  for (int p = 0; p < s.length(); ++p) {
    if (p == s.subject_idx || p == s.verb_idx) continue;
    const WordInfo& wi = vocab.info(s.tokens[p]);
    if (vocab.members(wi.word_class, wi.number).size() < 2) {
      throw SubstitutionError("cannot substitute '" + vocab.word(s.tokens[p]) + "' at position " +
                              std::to_string(p) + ": its word class has a single member");
    }
  }
  out.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    AgreementSentence variant = s;
    for (int p = 0; p < s.length(); ++p) {
      if (p == s.subject_idx || p == s.verb_idx) continue;
      const WordInfo& wi = vocab.info(s.tokens[p]);
      const auto& pool = vocab.members(wi.word_class, wi.number);
      variant.tokens[p] = pool[rng.below(pool.size())];
    }
    out.push_back(std::move(variant));
  }
  return out;
}

Corpus remove_overlap(const Corpus& corpus, const Corpus& other) {
  std::set<std::vector<int>> seen;
  for (const auto& s : other) seen.insert(s.tokens);
  Corpus out;
  for (const auto& s : corpus) {
    if (!seen.count(s.tokens)) out.push_back(s);
  }
  return out;
}

Corpus balance_numbers(const Corpus& corpus, Rng& rng) {
  std::vector<std::size_t> sg, pl;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (corpus[i].number == Number::Singular ? sg : pl).push_back(i);
  }
  auto& major = sg.size() > pl.size() ? sg : pl;
  const std::size_t keep = std::min(sg.size(), pl.size());
  rng.shuffle(major);
  major.resize(keep);
  std::vector<std::size_t> idx(sg);
  idx.insert(idx.end(), pl.begin(), pl.end());
  std::sort(idx.begin(), idx.end());
  Corpus out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(corpus[i]);
  return out;
}

std::string join_tokens(const std::vector<int>& tokens, const Vocab& vocab) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += vocab.word(tokens[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// TSV

namespace {

constexpr const char* kTsvHeader =
    "tokens\tsubject_idx\tverb_idx\tnumber\tcorrect_verb\tincorrect_verb\tattractor_offsets\t"
    "helpful_offsets\tk\tl\tm";

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

int parse_int(std::string_view text, std::size_t line, const std::string& field) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("line " + std::to_string(line) + ": field '" + field +
                         "' is not an integer: '" + std::string(text) + "'",
                     line, field);
  }
  return v;
}

std::vector<int> parse_int_list(std::string_view text, std::size_t line, const std::string& field) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_int(text.substr(start, comma - start), line, field));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

}  // namespace

Corpus parse_tsv(std::string_view text, const Vocab& vocab) {
  Corpus out;
  std::size_t line = 0;
  std::size_t start = 0;
  bool header_seen = false;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view row = text.substr(start, end - start);
    start = end + 1;
    ++line;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (!header_seen) {
      if (row != kTsvHeader) throw ParseError("line 1: unexpected TSV header", 1, "header");
      header_seen = true;
      continue;
    }
    if (row.empty()) continue;
    const auto f = split(row, '\t');
    if (f.size() != 11) {
      throw ParseError("line " + std::to_string(line) + ": expected 11 fields, got " +
                           std::to_string(f.size()),
                       line, "row");
    }
    AgreementSentence s;
    if (f[0].empty()) throw ParseError("line " + std::to_string(line) + ": empty tokens", line, "tokens");
    for (auto w : split(f[0], ' ')) s.tokens.push_back(vocab.id(w));
    s.subject_idx = parse_int(f[1], line, "subject_idx");
    s.verb_idx = parse_int(f[2], line, "verb_idx");
    try {
      s.number = parse_number(f[3]);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line) + ": " + e.what(), line, "number");
    }
    auto word_field = [&](std::string_view w, const std::string& field) {
      auto id = vocab.find(w);
      if (!id) {
        throw ParseError("line " + std::to_string(line) + ": field '" + field + "' word '" +
                             std::string(w) + "' is not in the vocabulary",
                         line, field);
      }
      return *id;
    };
    s.correct_verb = word_field(f[4], "correct_verb");
    s.incorrect_verb = word_field(f[5], "incorrect_verb");
    s.attractor_offsets = parse_int_list(f[6], line, "attractor_offsets");
    s.helpful_offsets = parse_int_list(f[7], line, "helpful_offsets");
    s.k = parse_int(f[8], line, "k");
    s.l = parse_int(f[9], line, "l");
    s.m = parse_int(f[10], line, "m");
    const auto violations = validate_sentence(s, vocab);
    if (!violations.empty()) {
      throw ParseError("line " + std::to_string(line) + ": field '" + violations.front().field +
                           "': " + violations.front().message,
                       line, violations.front().field);
    }
    out.push_back(std::move(s));
  }
  if (!header_seen) throw ParseError("empty TSV file: missing header", 1, "header");
  return out;
}

Corpus read_tsv(const std::string& path, const Vocab& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_tsv(ss.str(), vocab);
}

std::string format_tsv(const Corpus& corpus, const Vocab& vocab) {
  std::string out = kTsvHeader;
  out += '\n';
  for (const auto& s : corpus) {
    out += join_tokens(s.tokens, vocab);
    out += '\t' + std::to_string(s.subject_idx) + '\t' + std::to_string(s.verb_idx) + '\t';
    out += to_string(s.number);
    out += '\t' + vocab.word(s.correct_verb) + '\t' + vocab.word(s.incorrect_verb) + '\t';
    out += join_ints(s.attractor_offsets) + '\t' + join_ints(s.helpful_offsets) + '\t';
    out += std::to_string(s.k) + '\t' + std::to_string(s.l) + '\t' + std::to_string(s.m) + '\n';
  }
  return out;
}

void write_tsv(const Corpus& corpus, const std::string& path, const Vocab& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << format_tsv(corpus, vocab);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace agp
