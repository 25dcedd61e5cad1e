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

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "asreval/embed.hpp"
#include "asreval/kernels.hpp"

namespace asreval {

// Inverse document frequency over a reference corpus:
// weight(w) = ln((M + 1) / (df(w) + 1)), M = number of references.
class IdfTable {
 public:
  IdfTable() = default;
  IdfTable(std::unordered_map<std::string, double> weights, long long doc_count);

  // Special tokens weigh 0; tokens never seen weigh ln(M + 1).
  double weight(std::string_view token) const;
  long long doc_count() const { return doc_count_; }
  const std::unordered_map<std::string, double>& weights() const { return weights_; }

  // "#doc_count<TAB>M" then "token<TAB>weight" lines, sorted by token.
  void save(const std::filesystem::path& path) const;
  static IdfTable load(const std::filesystem::path& path);

 private:
  std::unordered_map<std::string, double> weights_;
  long long doc_count_ = 0;
};

// Throws DataError on an empty reference list.
IdfTable build_idf(const std::vector<std::string>& references, const Vocabulary& vocab);

struct BertScoreResult {
  double precision = 0.0;
  double recall = 0.0;
  double f_bert = 0.0;
};

// 2PR / (P + R) when P and R share a sign, else 0, so F stays between P
// and R.
double f_measure(double precision, double recall);

// Greedy-match BERTScore between a reference and a hypothesis. Special
// tokens take no part in matching. If every token on a side has idf
// weight 0 the side falls back to uniform weights. A side with no tokens
// scores 0; both sides empty throws DataError.
BertScoreResult score(std::string_view ref_text, std::string_view hyp_text,
                      const EmbeddingBackend& backend, const IdfTable& idf,
                      kernels::Exec exec = kernels::Exec::kSerial);

// Same computation on pre-computed inputs.
BertScoreResult score_embedded(const TokenSeq& ref, const EmbeddingMatrix& ref_emb,
                               const TokenSeq& hyp, const EmbeddingMatrix& hyp_emb,
                               const IdfTable& idf, kernels::Exec exec = kernels::Exec::kSerial);

}  // namespace asreval
