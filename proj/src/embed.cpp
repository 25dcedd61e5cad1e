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

#include "asreval/embed.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "asreval/corpus.hpp"
#include "asreval/error.hpp"
#include "asreval/text.hpp"

namespace asreval {
namespace {

constexpr std::size_t kMaxWordChars = 100;
constexpr std::string_view kSpecialTokens[] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::string content = read_file(path);
  std::vector<std::string> tokens;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    v.index_.emplace(v.tokens_[i], static_cast<std::int64_t>(i));
  }
  for (auto s : {kClsToken, kSepToken, kUnkToken}) {
    if (!v.contains(s)) {
      throw DataError("vocabulary '" + path.string() + "' lacks " + std::string(s));
    }
  }
  return v;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary v;
  for (auto s : kSpecialTokens) {
    bool present = false;
    for (const auto& t : tokens) present = present || t == s;
    if (!present) v.tokens_.emplace_back(s);
  }
  for (auto& t : tokens) v.tokens_.push_back(std::move(t));
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    v.index_.emplace(v.tokens_[i], static_cast<std::int64_t>(i));
  }
  return v;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.find(std::string(token)) != index_.end();
}

std::int64_t Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) throw DataError("token '" + std::string(token) + "' not in vocabulary");
  return it->second;
}

std::vector<std::string> basic_tokenize(std::string_view input) {
  std::u32string cps = text::decode_utf8(input);
  std::u32string cleaned;
  cleaned.reserve(cps.size());
  for (char32_t c : cps) {
    if (c == 0 || text::is_control(c)) continue;
    cleaned.push_back(text::is_whitespace(c) ? U' ' : text::to_lower(c));
  }
  cleaned = text::strip_accents(cleaned);

  std::vector<std::string> words;
  std::u32string cur;
  auto flush = [&] {
    if (!cur.empty()) words.push_back(text::encode_utf8(cur));
    cur.clear();
  };
  for (char32_t c : cleaned) {
    if (c == U' ') {
      flush();
    } else if (text::is_punctuation(c)) {
      flush();
      words.push_back(text::encode_utf8(std::u32string(1, c)));
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return words;
}

std::vector<std::string> wordpiece(std::string_view word, const Vocabulary& vocab) {
  std::u32string cps = text::decode_utf8(word);
  if (cps.size() > kMaxWordChars) return {std::string(kUnkToken)};
  std::vector<std::string> pieces;
  std::size_t start = 0;
  while (start < cps.size()) {
    std::size_t end = cps.size();
    std::string found;
    while (start < end) {
      std::string piece = text::encode_utf8(std::u32string_view(cps).substr(start, end - start));
      if (start > 0) piece = "##" + piece;
      if (vocab.contains(piece)) {
        found = std::move(piece);
        break;
      }
      --end;
    }
    if (found.empty()) return {std::string(kUnkToken)};
    pieces.push_back(std::move(found));
    start = end;
  }
  return pieces;
}

TokenSeq tokenize(std::string_view input, const Vocabulary& vocab) {
  TokenSeq seq;
  auto push = [&](std::string tok, bool special) {
    seq.ids.push_back(vocab.id(tok));
    seq.tokens.push_back(std::move(tok));
    seq.is_special.push_back(special);
  };
  push(std::string(kClsToken), true);
  for (const auto& word : basic_tokenize(input)) {
    for (auto& piece : wordpiece(word, vocab)) push(std::move(piece), false);
  }
  push(std::string(kSepToken), true);
  return seq;
}

void EmbeddingMatrix::normalize_rows() {
  for (std::size_t r = 0; r < rows_; ++r) {
    auto v = row(r);
    double sq = 0.0;
    for (double x : v) sq += x * x;
    double norm = std::sqrt(sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw DataError("embedding row " + std::to_string(r) + " has zero or non-finite norm");
    }
    for (double& x : v) x /= norm;
  }
}

std::vector<double> hashed_unit_vector(std::string_view token, std::size_t dim) {
  std::mt19937_64 rng(fnv1a(token));
  std::vector<double> v(dim);
  double sq = 0.0;
  while (sq == 0.0) {
    for (auto& x : v) {
      // 53 random bits mapped onto [-1, 1); portable across standard libraries.
      x = static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
      sq += x * x;
    }
  }
  double norm = std::sqrt(sq);
  for (auto& x : v) x /= norm;
  return v;
}

std::unique_ptr<StaticLookupBackend> StaticLookupBackend::load(const std::filesystem::path& tsv,
                                                               const std::filesystem::path& vocab_path) {
  std::string content = read_file(tsv);
  std::unordered_map<std::string, std::vector<double>> table;
  std::vector<std::string> order;
  std::size_t dim = 0;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError(tsv.string() + ": line " + std::to_string(line_no) + ": expected token<TAB>vector");
    }
    std::string token = line.substr(0, tab);
    std::istringstream nums(line.substr(tab + 1));
    std::vector<double> v;
    std::string field;
    while (nums >> field) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw DataError(tsv.string() + ": line " + std::to_string(line_no) + ": bad number '" + field + "'");
      }
    }
    if (v.empty()) {
      throw DataError(tsv.string() + ": line " + std::to_string(line_no) + ": empty vector");
    }
    if (dim == 0) dim = v.size();
    if (v.size() != dim) {
      throw DataError(tsv.string() + ": line " + std::to_string(line_no) + ": dimension " +
                      std::to_string(v.size()) + " != " + std::to_string(dim));
    }
    if (table.emplace(token, std::move(v)).second) order.push_back(token);
  }
  if (dim == 0) throw DataError(tsv.string() + ": empty embedding table");
  Vocabulary vocab = vocab_path.empty() ? Vocabulary::from_tokens(order) : Vocabulary::load(vocab_path);
  return std::make_unique<StaticLookupBackend>(std::move(table), dim, std::move(vocab));
}

StaticLookupBackend::StaticLookupBackend(std::unordered_map<std::string, std::vector<double>> table,
                                         std::size_t dim, Vocabulary vocab)
    : table_(std::move(table)), dim_(dim), vocab_(std::move(vocab)) {
  for (const auto& [token, v] : table_) {
    if (v.size() != dim_) throw DataError("lookup vector for '" + token + "' has wrong dimension");
  }
}

std::vector<double> StaticLookupBackend::vector_for(const std::string& token) const {
  auto it = table_.find(token);
  if (it != table_.end()) return it->second;
  return hashed_unit_vector(token, dim_);
}

EmbeddingMatrix StaticLookupBackend::encode(const TokenSeq& seq) const {
  EmbeddingMatrix m(seq.size(), dim_);
  for (std::size_t r = 0; r < seq.size(); ++r) {
    auto v = vector_for(seq.tokens[r]);
    std::copy(v.begin(), v.end(), m.row(r).begin());
  }
  return m;
}

EmbeddingMatrix embed(const TokenSeq& seq, const EmbeddingBackend& backend) {
  EmbeddingMatrix m = backend.encode(seq);
  if (m.rows() != seq.size()) {
    throw DataError(backend.name() + " backend returned " + std::to_string(m.rows()) +
                    " rows for " + std::to_string(seq.size()) + " tokens");
  }
  if (m.dim() != backend.dim()) {
    throw DataError(backend.name() + " backend returned width " + std::to_string(m.dim()) +
                    ", expected " + std::to_string(backend.dim()));
  }
  m.normalize_rows();
  return m;
}

}  // namespace asreval
