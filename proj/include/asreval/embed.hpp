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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace asreval {

inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kUnkToken = "[UNK]";

// WordPiece vocabulary: one token per line, the line index is the id.
class Vocabulary {
 public:
  static Vocabulary load(const std::filesystem::path& path);
  // Builds a vocabulary from a token list, appending the special tokens
  // that are missing.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  bool contains(std::string_view token) const;
  // Throws DataError when absent.
  std::int64_t id(std::string_view token) const;
  std::int64_t unk_id() const { return id(kUnkToken); }
  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::int64_t id) const { return tokens_.at(static_cast<std::size_t>(id)); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int64_t> index_;
};

struct TokenSeq {
  std::vector<std::string> tokens;
  std::vector<std::int64_t> ids;
  std::vector<bool> is_special;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const TokenSeq&) const = default;
};

// Uncased BERT tokenization: drop control characters, lowercase, strip
// accents, split on whitespace and punctuation, then greedy longest-match
// WordPiece with "##" continuation pieces. Words with no segmentation map
// to [UNK]. The result is wrapped in [CLS] ... [SEP].
TokenSeq tokenize(std::string_view text, const Vocabulary& vocab);

// The pre-WordPiece word split, exposed for tests and idf bookkeeping.
std::vector<std::string> basic_tokenize(std::string_view text);
std::vector<std::string> wordpiece(std::string_view word, const Vocabulary& vocab);

// One unit-norm row per token.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim) {}

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * dim_, dim_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * dim_, dim_}; }
  std::span<const double> data() const { return data_; }

  // Scales every row to Euclidean norm 1; throws DataError on a zero row.
  void normalize_rows();

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// Turns a token sequence into embeddings. Implementations are immutable
// after construction and safe to call from several threads.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual const Vocabulary& vocabulary() const = 0;
  // Rows need not be normalized; embed() below does that.
  virtual EmbeddingMatrix encode(const TokenSeq& seq) const = 0;
};

// Context-free token -> vector table read from a TSV file
// ("token<TAB>v1 v2 ... vd"). Tokens missing from the table get a
// pseudo-random unit vector derived from the token string.
class StaticLookupBackend final : public EmbeddingBackend {
 public:
  // Without a vocabulary file the table's own tokens form the vocabulary.
  static std::unique_ptr<StaticLookupBackend> load(const std::filesystem::path& tsv,
                                                   const std::filesystem::path& vocab = {});
  StaticLookupBackend(std::unordered_map<std::string, std::vector<double>> table, std::size_t dim,
                      Vocabulary vocab);

  std::string name() const override { return "static"; }
  std::size_t dim() const override { return dim_; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  EmbeddingMatrix encode(const TokenSeq& seq) const override;

  std::vector<double> vector_for(const std::string& token) const;

 private:
  std::unordered_map<std::string, std::vector<double>> table_;
  std::size_t dim_;
  Vocabulary vocab_;
};

// Deterministic unit vector seeded by the token text.
std::vector<double> hashed_unit_vector(std::string_view token, std::size_t dim);

// Encodes and unit-normalizes; checks the row count and width.
EmbeddingMatrix embed(const TokenSeq& seq, const EmbeddingBackend& backend);

}  // namespace asreval
