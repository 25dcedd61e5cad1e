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

#include "asreval/bertscore.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "asreval/corpus.hpp"
#include "asreval/error.hpp"

namespace asreval {
namespace {

bool is_special(std::string_view token) {
  return token == kClsToken || token == kSepToken || token == "[PAD]" || token == "[MASK]";
}

struct Side {
  std::vector<double> rows;  // non-special embedding rows, packed
  std::vector<double> weights;
  std::size_t count = 0;
};

Side gather(const TokenSeq& seq, const EmbeddingMatrix& emb, const IdfTable& idf) {
  Side side;
  for (std::size_t r = 0; r < seq.size(); ++r) {
    if (seq.is_special[r]) continue;
    auto row = emb.row(r);
    side.rows.insert(side.rows.end(), row.begin(), row.end());
    side.weights.push_back(idf.weight(seq.tokens[r]));
    ++side.count;
  }
  double total = 0.0;
  for (double w : side.weights) total += w;
  if (total <= 0.0) std::fill(side.weights.begin(), side.weights.end(), 1.0);
  return side;
}

double weighted_mean(const std::vector<double>& values, const std::vector<double>& weights) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += weights[i] * values[i];
    den += weights[i];
  }
  return num / den;
}

}  // namespace

IdfTable::IdfTable(std::unordered_map<std::string, double> weights, long long doc_count)
    : weights_(std::move(weights)), doc_count_(doc_count) {
  for (const auto& [token, w] : weights_) {
    if (!(w >= 0.0)) throw DataError("idf weight for '" + token + "' is negative");
  }
}

double IdfTable::weight(std::string_view token) const {
  if (is_special(token)) return 0.0;
  auto it = weights_.find(std::string(token));
  if (it != weights_.end()) return it->second;
  return std::log(static_cast<double>(doc_count_ + 1));
}

void IdfTable::save(const std::filesystem::path& path) const {
  std::vector<std::pair<std::string, double>> rows(weights_.begin(), weights_.end());
  std::sort(rows.begin(), rows.end());
  std::ostringstream out;
  out.precision(17);
  out << "#doc_count\t" << doc_count_ << '\n';
  for (const auto& [token, w] : rows) out << token << '\t' << w << '\n';
  write_file(path, out.str());
}

IdfTable IdfTable::load(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  long long docs = -1;
  std::unordered_map<std::string, double> weights;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": expected token<TAB>weight");
    }
    std::string key = line.substr(0, tab);
    std::string value = line.substr(tab + 1);
    try {
      if (key == "#doc_count") {
        docs = std::stoll(value);
      } else {
        weights[key] = std::stod(value);
      }
    } catch (const std::exception&) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": bad number '" + value + "'");
    }
  }
  if (docs < 1) throw DataError(path.string() + ": missing #doc_count header");
  return IdfTable(std::move(weights), docs);
}

IdfTable build_idf(const std::vector<std::string>& references, const Vocabulary& vocab) {
  if (references.empty()) throw DataError("idf needs at least one reference");
  std::unordered_map<std::string, long long> df;
  for (const auto& ref : references) {
    TokenSeq seq = tokenize(ref, vocab);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (!seq.is_special[i]) seen.insert(seq.tokens[i]);
    }
    for (const auto& t : seen) ++df[t];
  }
  const auto docs = static_cast<long long>(references.size());
  std::unordered_map<std::string, double> weights;
  for (const auto& [token, count] : df) {
    weights[token] = std::log(static_cast<double>(docs + 1) / static_cast<double>(count + 1));
  }
  return IdfTable(std::move(weights), docs);
}

double f_measure(double precision, double recall) {
  // Opposite signs would put the harmonic mean outside [min, max].
  if (precision * recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

BertScoreResult score_embedded(const TokenSeq& ref, const EmbeddingMatrix& ref_emb,
                               const TokenSeq& hyp, const EmbeddingMatrix& hyp_emb,
                               const IdfTable& idf, kernels::Exec exec) {
  if (ref_emb.dim() != hyp_emb.dim()) throw DataError("embedding widths differ");
  Side x = gather(ref, ref_emb, idf);
  Side y = gather(hyp, hyp_emb, idf);
  if (x.count == 0 && y.count == 0) {
    throw DataError("reference and hypothesis are both empty after tokenization");
  }
  BertScoreResult r;
  if (x.count == 0 || y.count == 0) return r;
  std::vector<double> ref_best(x.count);
  std::vector<double> hyp_best(y.count);
  kernels::greedy_max(exec, x.rows, x.count, y.rows, y.count, ref_emb.dim(), ref_best, hyp_best);
  // Dot products of unit rows can round to just past +-1.
  r.recall = std::clamp(weighted_mean(ref_best, x.weights), -1.0, 1.0);
  r.precision = std::clamp(weighted_mean(hyp_best, y.weights), -1.0, 1.0);
  r.f_bert = f_measure(r.precision, r.recall);
  return r;
}

BertScoreResult score(std::string_view ref_text, std::string_view hyp_text,
                      const EmbeddingBackend& backend, const IdfTable& idf, kernels::Exec exec) {
  TokenSeq ref = tokenize(ref_text, backend.vocabulary());
  TokenSeq hyp = tokenize(hyp_text, backend.vocabulary());
  EmbeddingMatrix ref_emb = embed(ref, backend);
  EmbeddingMatrix hyp_emb = embed(hyp, backend);
  return score_embedded(ref, ref_emb, hyp, hyp_emb, idf, exec);
}

}  // namespace asreval
