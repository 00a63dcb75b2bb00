// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#include "agp/vocab.hpp"

#include <fstream>
#include <sstream>

#include "agp/error.hpp"

namespace agp {

namespace {

constexpr std::size_t kClassCount = 9;

// Determiners carry no number so that only nouns and verbs mark agreement.
constexpr const char* kNouns[][2] = {
    {"dog", "dogs"},         {"cat", "cats"},           {"bird", "birds"},
    {"horse", "horses"},     {"teacher", "teachers"},   {"student", "students"},
    {"doctor", "doctors"},   {"farmer", "farmers"},     {"pilot", "pilots"},
    {"singer", "singers"},   {"writer", "writers"},     {"player", "players"},
    {"friend", "friends"},   {"neighbor", "neighbors"}, {"officer", "officers"},
    {"lawyer", "lawyers"},   {"driver", "drivers"},     {"worker", "workers"},
    {"artist", "artists"},   {"senator", "senators"},   {"king", "kings"},
    {"queen", "queens"},     {"boy", "boys"},           {"girl", "girls"},
    {"author", "authors"},   {"manager", "managers"},   {"farm", "farms"},
    {"table", "tables"},     {"house", "houses"},       {"car", "cars"},
    {"book", "books"},       {"tree", "trees"},         {"river", "rivers"},
    {"garden", "gardens"},   {"school", "schools"},     {"park", "parks"},
    {"road", "roads"},       {"window", "windows"},     {"door", "doors"},
    {"machine", "machines"}, {"painting", "paintings"}, {"village", "villages"},
    {"engineer", "engineers"}, {"nurse", "nurses"},
};

constexpr const char* kVerbs[][2] = {
    {"runs", "run"},       {"sleeps", "sleep"},   {"laughs", "laugh"},
    {"smiles", "smile"},   {"waits", "wait"},     {"works", "work"},
    {"sings", "sing"},     {"falls", "fall"},     {"stays", "stay"},
    {"wins", "win"},       {"talks", "talk"},     {"moves", "move"},
    {"jumps", "jump"},     {"walks", "walk"},     {"reads", "read"},
    {"swims", "swim"},     {"listens", "listen"}, {"agrees", "agree"},
    {"remains", "remain"}, {"appears", "appear"}, {"knows", "know"},
    {"likes", "like"},
};

constexpr const char* kDeterminers[] = {"the", "my", "your", "our", "their", "his", "her", "its"};
constexpr const char* kPrepositions[] = {"of",     "near", "behind", "with",
                                         "beside", "by",   "from",   "above"};
constexpr const char* kAdjectives[] = {"old",   "young", "big",    "small", "happy", "quiet",
                                       "angry", "tall",  "famous", "new",   "red",   "strange"};
constexpr const char* kAdverbs[] = {"often", "rarely", "really", "also",  "still",
                                    "never", "always", "surely", "again", "today"};

std::optional<WordClass> class_from_keyword(std::string_view kw) {
  if (kw == "noun") return WordClass::Noun;
  if (kw == "verb") return WordClass::Verb;
  if (kw == "det") return WordClass::Determiner;
  if (kw == "prep") return WordClass::Preposition;
  if (kw == "adj") return WordClass::Adjective;
  if (kw == "adv") return WordClass::Adverb;
  if (kw == "other") return WordClass::Other;
  return std::nullopt;
}

std::string_view keyword(WordClass c) {
  switch (c) {
    case WordClass::Noun: return "noun";
    case WordClass::Verb: return "verb";
    case WordClass::Determiner: return "det";
    case WordClass::Preposition: return "prep";
    case WordClass::Adjective: return "adj";
    case WordClass::Adverb: return "adv";
    case WordClass::Other: return "other";
    default: return "?";
  }
}

}  // namespace

std::string_view to_string(Number n) noexcept { return n == Number::Singular ? "SG" : "PL"; }

Number parse_number(std::string_view s) {
  if (s == "SG") return Number::Singular;
  if (s == "PL") return Number::Plural;
  throw ParseError("number must be SG or PL, got '" + std::string(s) + "'", 0, "number");
}

std::string_view to_string(WordClass c) noexcept {
  switch (c) {
    case WordClass::Noun: return "noun";
    case WordClass::Verb: return "verb";
    case WordClass::Determiner: return "determiner";
    case WordClass::Preposition: return "preposition";
    case WordClass::Adjective: return "adjective";
    case WordClass::Adverb: return "adverb";
    case WordClass::Other: return "other";
    case WordClass::End: return "end";
    case WordClass::Unknown: return "unknown";
  }
  return "unknown";
}

Vocab::Vocab() : buckets_(kClassCount * 3) {
  insert(kEnd, WordInfo{WordClass::End, std::nullopt, -1});
  insert(kUnknown, WordInfo{WordClass::Unknown, std::nullopt, -1});
}

const Vocab& Vocab::builtin() {
  static const Vocab v = [] {
    Vocab out;
    for (const auto& p : kNouns) out.add_pair(WordClass::Noun, p[0], p[1]);
    for (const auto& p : kVerbs) out.add_pair(WordClass::Verb, p[0], p[1]);
    for (const char* w : kDeterminers) out.add_word(WordClass::Determiner, w);
    for (const char* w : kPrepositions) out.add_word(WordClass::Preposition, w);
    for (const char* w : kAdjectives) out.add_word(WordClass::Adjective, w);
    for (const char* w : kAdverbs) out.add_word(WordClass::Adverb, w);
    return out;
  }();
  return v;
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

Vocab Vocab::parse(std::string_view text) {
  Vocab out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string kw;
    if (!(fields >> kw)) continue;
    auto cls = class_from_keyword(kw);
    if (!cls) throw ParseError("unknown word class '" + kw + "'", lineno, "class");
    std::vector<std::string> words;
    for (std::string w; fields >> w;) words.push_back(w);
    const bool paired = *cls == WordClass::Noun || *cls == WordClass::Verb;
    if (words.size() != (paired ? 2u : 1u)) {
      throw ParseError(kw + " entries take " + std::string(paired ? "2" : "1") + " word(s)", lineno,
                       "words");
    }
    try {
      if (paired) {
        out.add_pair(*cls, words[0], words[1]);
      } else {
        out.add_word(*cls, words[0]);
      }
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno, "words");
    }
  }
  return out;
}

std::size_t Vocab::bucket(WordClass c, std::optional<Number> n) {
  std::size_t slot = n ? (*n == Number::Singular ? 1 : 2) : 0;
  return static_cast<std::size_t>(c) * 3 + slot;
}

int Vocab::insert(std::string_view word, WordInfo info) {
  std::string key(word);
  if (key.empty() || key.find_first_of(" \t\r\n") != std::string::npos) {
    throw Error("vocabulary word '" + key + "' is empty or contains whitespace");
  }
  if (index_.count(key)) throw Error("duplicate vocabulary word '" + key + "'");
  const int id = static_cast<int>(words_.size());
  words_.push_back(key);
  infos_.push_back(info);
  index_.emplace(std::move(key), id);
  buckets_[bucket(info.word_class, std::nullopt)].push_back(id);
  if (info.number) buckets_[bucket(info.word_class, info.number)].push_back(id);
  return id;
}

void Vocab::add_pair(WordClass c, std::string_view singular, std::string_view plural) {
  if (c != WordClass::Noun && c != WordClass::Verb) {
    throw Error("only nouns and verbs come in number pairs");
  }
  if (singular == plural) {
    throw Error("pair '" + std::string(singular) + "' has identical singular and plural forms");
  }
  auto& pairs = c == WordClass::Noun ? nouns_ : verbs_;
  const int pair = static_cast<int>(pairs.size());
  const int sg = insert(singular, WordInfo{c, Number::Singular, pair});
  const int pl = insert(plural, WordInfo{c, Number::Plural, pair});
  pairs.emplace_back(sg, pl);
}

void Vocab::add_word(WordClass c, std::string_view word) {
  if (c == WordClass::Noun || c == WordClass::Verb || c == WordClass::End ||
      c == WordClass::Unknown) {
    throw Error("class " + std::string(to_string(c)) + " cannot be added as a single word");
  }
  insert(word, WordInfo{c, std::nullopt, -1});
}

std::optional<int> Vocab::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Vocab::id(std::string_view word) const { return find(word).value_or(unknown_id()); }

const std::string& Vocab::word(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= words_.size()) {
    throw DimensionError("word id " + std::to_string(id) + " outside vocabulary of size " +
                         std::to_string(words_.size()));
  }
  return words_[id];
}

const WordInfo& Vocab::info(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= infos_.size()) {
    throw DimensionError("word id " + std::to_string(id) + " outside vocabulary of size " +
                         std::to_string(infos_.size()));
  }
  return infos_[id];
}

int Vocab::noun(std::size_t pair, Number n) const {
  const auto& p = nouns_.at(pair);
  return n == Number::Singular ? p.first : p.second;
}

int Vocab::verb(std::size_t pair, Number n) const {
  const auto& p = verbs_.at(pair);
  return n == Number::Singular ? p.first : p.second;
}

int Vocab::opposite_form(int id) const {
  const WordInfo& wi = info(id);
  if (wi.word_class == WordClass::Noun) return noun(wi.pair, opposite(*wi.number));
  if (wi.word_class == WordClass::Verb) return verb(wi.pair, opposite(*wi.number));
  throw Error("word '" + word(id) + "' has no number counterpart");
}

const std::vector<int>& Vocab::members(WordClass c, std::optional<Number> n) const {
  return buckets_[bucket(c, n)];
}

std::string Vocab::to_text() const {
  std::string out;
  for (const auto& [sg, pl] : nouns_) out += "noun " + words_[sg] + " " + words_[pl] + "\n";
  for (const auto& [sg, pl] : verbs_) out += "verb " + words_[sg] + " " + words_[pl] + "\n";
  for (std::size_t id = 2; id < words_.size(); ++id) {
    const auto c = infos_[id].word_class;
    if (c == WordClass::Noun || c == WordClass::Verb) continue;
    out += std::string(keyword(c)) + " " + words_[id] + "\n";
  }
  return out;
}

}  // namespace agp
