// Copyright 2026 The asreval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "asreval/classify.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

#include "asreval/corpus.hpp"
#include "asreval/default_resources.hpp"
#include "asreval/error.hpp"
#include "asreval/text.hpp"

namespace asreval {
namespace {

constexpr std::array<std::string_view, 20> kOnes = {
    "zero",    "one",     "two",       "three",    "four",     "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen"};
constexpr std::array<std::string_view, 10> kTens = {"",      "",      "twenty",  "thirty", "forty",
                                                    "fifty", "sixty", "seventy", "eighty", "ninety"};

std::vector<std::string> lines_of(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() != '#') out.push_back(line);
  }
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_number_word(std::string_view w) {
  if (w == "hundred" || w == "thousand") return true;
  for (auto o : kOnes) if (o == w) return true;
  for (auto t : kTens) if (!t.empty() && t == w) return true;
  return false;
}

std::string ordinal_of(std::string word) {
  static const std::pair<std::string_view, std::string_view> kIrregular[] = {
      {"one", "first"}, {"two", "second"}, {"three", "third"}, {"five", "fifth"},
      {"eight", "eighth"}, {"nine", "ninth"}, {"twelve", "twelfth"}};
  for (auto [c, o] : kIrregular) {
    if (word == c) return std::string(o);
  }
  if (!word.empty() && word.back() == 'y') return word.substr(0, word.size() - 1) + "ieth";
  return word + "th";
}

void append_words(std::vector<std::string>& out, const std::string& phrase) {
  for (auto& w : text::split_whitespace(phrase)) out.push_back(std::move(w));
}

// Spoken form of one token; empty when it carries no words.
void canonicalize_token(std::string token, std::vector<std::string>& out) {
  // Thousands separators: 1,000 -> 1000.
  std::string compact;
  for (std::size_t i = 0; i < token.size(); ++i) {
    bool sep = token[i] == ',' && i > 0 && i + 1 < token.size() && std::isdigit(static_cast<unsigned char>(token[i - 1])) &&
               std::isdigit(static_cast<unsigned char>(token[i + 1]));
    if (!sep) compact.push_back(token[i]);
  }
  token = compact;

  if (auto colon = token.find(':'); colon != std::string::npos) {
    std::string hh = token.substr(0, colon);
    std::string mm = token.substr(colon + 1);
    if (all_digits(hh) && hh.size() <= 2 && all_digits(mm) && mm.size() == 2) {
      out.push_back(spell_cardinal(std::stoi(hh)));
      int minutes = std::stoi(mm);
      if (minutes > 0 && minutes < 10) {
        out.emplace_back("oh");
        out.emplace_back(kOnes[minutes]);
      } else if (minutes >= 10) {
        append_words(out, spell_cardinal(minutes));
      }
      return;
    }
  }
  if (token.size() > 1 && token.back() == '%' && all_digits(token.substr(0, token.size() - 1))) {
    std::string digits = token.substr(0, token.size() - 1);
    if (digits.size() <= 4) {
      append_words(out, spell_cardinal(std::stoi(digits)));
      out.emplace_back("percent");
      return;
    }
  }
  if (token.size() > 2) {
    std::string suffix = token.substr(token.size() - 2);
    std::string digits = token.substr(0, token.size() - 2);
    if ((suffix == "st" || suffix == "nd" || suffix == "rd" || suffix == "th") && all_digits(digits) &&
        digits.size() <= 4) {
      std::vector<std::string> words;
      append_words(words, spell_cardinal(std::stoi(digits)));
      words.back() = ordinal_of(words.back());
      for (auto& w : words) out.push_back(std::move(w));
      return;
    }
  }
  if (all_digits(token) && token.size() <= 4) {
    append_words(out, spell_cardinal(std::stoi(token)));
    return;
  }
  if (token == "%") {
    out.emplace_back("percent");
    return;
  }
  // Hyphens separate words; every other punctuation mark disappears.
  std::u32string cps = text::decode_utf8(token);
  std::u32string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      std::string w = text::encode_utf8(cur);
      if (w != "oclock") out.push_back(std::move(w));
    }
    cur.clear();
  };
  for (char32_t c : cps) {
    if (c == U'-' || c == 0x2010 || c == 0x2013) {
      flush();
    } else if (!text::is_punctuation(c) && c != 0x2019) {
      cur.push_back(c);
    }
  }
  flush();
}

struct Cluster {
  std::vector<const EditOp*> ops;
  std::size_t ref_begin = 0, ref_end = 0;
  std::size_t hyp_begin = 0, hyp_end = 0;
};

std::vector<Cluster> clusters_of(const AlignmentResult& alignment) {
  std::vector<Cluster> out;
  std::size_t ri = 0, hi = 0;
  bool open = false;
  for (const auto& op : alignment.ops) {
    if (op.kind == EditOp::Kind::kMatch) {
      open = false;
      ++ri;
      ++hi;
      continue;
    }
    if (!open) {
      out.push_back({{}, ri, ri, hi, hi});
      open = true;
    }
    Cluster& c = out.back();
    c.ops.push_back(&op);
    if (op.kind != EditOp::Kind::kInsertion) c.ref_end = ++ri;
    if (op.kind != EditOp::Kind::kDeletion) c.hyp_end = ++hi;
  }
  return out;
}

std::vector<std::string> norms(const std::vector<SurfaceToken>& toks, std::size_t b, std::size_t e) {
  std::vector<std::string> out;
  for (std::size_t i = b; i < e; ++i) out.push_back(toks[i].norm);
  return out;
}

std::vector<std::string> expand_contractions(const std::vector<std::string>& words,
                                             const ClassifierResources& res) {
  std::vector<std::string> out;
  for (const auto& w : words) {
    auto it = res.contractions.find(w);
    if (it == res.contractions.end()) {
      out.push_back(w);
    } else {
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  return out;
}

std::string joined(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) s += w;
  return s;
}

bool is_upper_initial(std::string_view surface) {
  std::u32string cps = text::decode_utf8(surface);
  for (char32_t c : cps) {
    if (text::is_punctuation(c)) continue;
    return text::to_lower(c) != c;
  }
  return false;
}

bool proper_noun_like(const std::vector<SurfaceToken>& ref, std::size_t i, const ClassifierResources& res) {
  const std::string folded = text::strip_accents(ref[i].norm);
  if (res.proper_nouns.count(ref[i].norm) || res.proper_nouns.count(folded)) return true;
  if (folded == "i" || folded.rfind("i'", 0) == 0) return false;
  if (i == 0 || !is_upper_initial(ref[i].surface)) return false;
  const std::string& prev = ref[i - 1].surface;
  char last = prev.empty() ? '.' : prev.back();
  return last != '.' && last != '!' && last != '?';
}

bool strict_prefix(const std::string& whole, const std::string& part) {
  return !part.empty() && part.size() < whole.size() && whole.compare(0, part.size(), part) == 0;
}

bool all_of_kind(const Cluster& c, EditOp::Kind kind) {
  return std::all_of(c.ops.begin(), c.ops.end(), [&](const EditOp* op) { return op->kind == kind; });
}

ErrorType classify_cluster(const Cluster& c, const std::vector<SurfaceToken>& ref,
                           const std::vector<SurfaceToken>& hyp, const ClassifierResources& res,
                           ErrorTypeSet& per_op) {
  auto ref_words = norms(ref, c.ref_begin, c.ref_end);
  auto hyp_words = norms(hyp, c.hyp_begin, c.hyp_end);

  if (expand_contractions(ref_words, res) == expand_contractions(hyp_words, res)) {
    return ErrorType::kContraction;
  }

  auto ref_canon = canonical_words(ref_words);
  auto hyp_canon = canonical_words(hyp_words);
  if (ref_canon == hyp_canon || joined(ref_canon) == joined(hyp_canon)) {
    return ErrorType::kNormalization;
  }

  const bool all_subs = all_of_kind(c, EditOp::Kind::kSubstitution);
  if (all_subs && std::all_of(c.ops.begin(), c.ops.end(), [&](const EditOp* op) {
        return res.homophones(op->ref, op->hyp);
      })) {
    return ErrorType::kHomophone;
  }

  if (all_subs) {
    bool spelling = true;
    for (std::size_t k = 0; k < c.ops.size() && spelling; ++k) {
      const EditOp& op = *c.ops[k];
      if (res.spelling_pair(op.ref, op.hyp)) continue;
      bool near = char_edit_distance(op.ref, op.hyp) == 1 &&
                  std::min(text::decode_utf8(op.ref).size(), text::decode_utf8(op.hyp).size()) >= 5;
      spelling = near && !proper_noun_like(ref, c.ref_begin + k, res);
    }
    if (spelling) return ErrorType::kSpelling;
  }

  // Adjacent substitutions that only fail together ("to buy color" ->
  // "to by colour") are labelled one word at a time.
  if (all_subs && c.ops.size() > 1) {
    for (std::size_t k = 0; k < c.ops.size(); ++k) {
      Cluster one{{c.ops[k]}, c.ref_begin + k, c.ref_begin + k + 1, c.hyp_begin + k, c.hyp_begin + k + 1};
      per_op.insert(classify_cluster(one, ref, hyp, res, per_op));
    }
    return *per_op.begin();
  }

  {
    std::size_t ri = c.ref_begin;
    for (const EditOp* op : c.ops) {
      if (op->kind == EditOp::Kind::kInsertion) continue;
      if (op->kind == EditOp::Kind::kSubstitution && proper_noun_like(ref, ri, res)) {
        return ErrorType::kProperNoun;
      }
      ++ri;
    }
  }

  if (all_of_kind(c, EditOp::Kind::kInsertion)) {
    const std::size_t n = hyp_words.size();
    auto same = [&](std::size_t begin) {
      for (std::size_t k = 0; k < n; ++k) {
        if (hyp[begin + k].norm != hyp_words[k]) return false;
      }
      return true;
    };
    bool before = c.hyp_begin >= n && same(c.hyp_begin - n);
    bool after = c.hyp_end + n <= hyp.size() && same(c.hyp_end);
    if (before || after) return ErrorType::kRepetition;
  }

  if (std::all_of(c.ops.begin(), c.ops.end(), [](const EditOp* op) {
        return op->kind == EditOp::Kind::kDeletion ||
               (op->kind == EditOp::Kind::kSubstitution && strict_prefix(op->ref, op->hyp));
      })) {
    return ErrorType::kDeletion;
  }
  return ErrorType::kWordError;
}

}  // namespace

std::string spell_cardinal(int n) {
  if (n < 0 || n > 9999) throw DataError("cardinal out of range: " + std::to_string(n));
  if (n < 20) return std::string(kOnes[n]);
  if (n < 100) {
    std::string s(kTens[n / 10]);
    if (n % 10) s += " " + std::string(kOnes[n % 10]);
    return s;
  }
  if (n < 1000) {
    std::string s = std::string(kOnes[n / 100]) + " hundred";
    if (n % 100) s += " " + spell_cardinal(n % 100);
    return s;
  }
  std::string s = std::string(kOnes[n / 1000]) + " thousand";
  if (n % 1000) s += " " + spell_cardinal(n % 1000);
  return s;
}

std::vector<std::string> canonical_words(const std::vector<std::string>& tokens) {
  std::vector<std::string> words;
  for (const auto& t : tokens) canonicalize_token(text::strip_accents(text::lowercase(t)), words);
  // "one hundred and five" reads the same as "105".
  std::vector<std::string> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] == "and" && i > 0 && i + 1 < words.size() &&
        (words[i - 1] == "hundred" || words[i - 1] == "thousand") && is_number_word(words[i + 1])) {
      continue;
    }
    out.push_back(words[i]);
  }
  return out;
}

int char_edit_distance(std::string_view a_text, std::string_view b_text) {
  std::u32string a = text::decode_utf8(a_text);
  std::u32string b = text::decode_utf8(b_text);
  std::vector<int> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      int up = row[j];
      row[j] = std::min({diag + (a[i - 1] == b[j - 1] ? 0 : 1), up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[b.size()];
}

void ClassifierResources::add_contractions(std::string_view tsv) {
  for (const auto& line : lines_of(tsv)) {
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("contraction line lacks a tab: '" + line + "'");
    contractions[text::lowercase(line.substr(0, tab))] = text::split_whitespace(text::lowercase(line.substr(tab + 1)));
  }
}

void ClassifierResources::add_homophones(std::string_view lines) {
  for (const auto& line : lines_of(lines)) {
    std::size_t set_id = homophone_set_count++;
    std::string word;
    std::istringstream in(text::lowercase(line));
    while (std::getline(in, word, ',')) {
      auto parts = text::split_whitespace(word);
      if (parts.size() == 1) homophone_set_of[parts[0]] = set_id;
    }
  }
}

void ClassifierResources::add_spellings(std::string_view tsv) {
  for (const auto& line : lines_of(tsv)) {
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("spelling line lacks a tab: '" + line + "'");
    std::string a = text::lowercase(line.substr(0, tab));
    std::string b = text::lowercase(line.substr(tab + 1));
    spelling_variants[a].insert(b);
    spelling_variants[b].insert(a);
  }
}

void ClassifierResources::add_proper_nouns(std::string_view lines) {
  for (const auto& line : lines_of(lines)) {
    for (auto& w : text::split_whitespace(text::lowercase(line))) proper_nouns.insert(std::move(w));
  }
}

bool ClassifierResources::homophones(const std::string& a, const std::string& b) const {
  auto ia = homophone_set_of.find(a);
  auto ib = homophone_set_of.find(b);
  return a != b && ia != homophone_set_of.end() && ib != homophone_set_of.end() && ia->second == ib->second;
}

bool ClassifierResources::spelling_pair(const std::string& a, const std::string& b) const {
  auto it = spelling_variants.find(a);
  return it != spelling_variants.end() && it->second.count(b) > 0;
}

ClassifierResources ClassifierResources::defaults() {
  ClassifierResources r;
  r.add_contractions(resources::kContractions);
  r.add_homophones(resources::kHomophones);
  r.add_spellings(resources::kSpellings);
  r.add_proper_nouns(resources::kProperNouns);
  return r;
}

ClassifierResources ClassifierResources::load_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("resource directory '" + dir.string() + "' does not exist");
  }
  auto pick = [&](const char* name, std::string_view fallback) {
    auto p = dir / name;
    return std::filesystem::exists(p) ? read_file(p) : std::string(fallback);
  };
  ClassifierResources r;
  r.add_contractions(pick("contractions.tsv", resources::kContractions));
  r.add_homophones(pick("homophones.txt", resources::kHomophones));
  r.add_spellings(pick("spellings.tsv", resources::kSpellings));
  r.add_proper_nouns(pick("proper_nouns.txt", resources::kProperNouns));
  return r;
}

ErrorTypeSet classify(std::string_view ref_text, std::string_view hyp_text, const AlignmentResult& alignment,
                      const ClassifierResources& resources) {
  auto ref = normalize_with_surface(ref_text);
  auto hyp = normalize_with_surface(hyp_text);
  auto ref_norm = norms(ref, 0, ref.size());
  auto hyp_norm = norms(hyp, 0, hyp.size());
  if (alignment.ref_tokens() != ref_norm || alignment.hyp_tokens() != hyp_norm) {
    throw DataError("alignment was not computed from this reference/hypothesis pair");
  }
  ErrorTypeSet types;
  for (const auto& c : clusters_of(alignment)) types.insert(classify_cluster(c, ref, hyp, resources, types));
  return types;
}

}  // namespace asreval
