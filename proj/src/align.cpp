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

#include "asreval/align.hpp"

#include <algorithm>

#include "asreval/error.hpp"
#include "asreval/text.hpp"

namespace asreval {
namespace {

bool is_edge_punct(char32_t c) {
  switch (c) {
    case U'.': case U',': case U'!': case U'?': case U';': case U':':
    case U'"': case U'(': case U')': case U'[': case U']': case U'{': case U'}':
    case 0x2026:  // ellipsis
    case 0x201C: case 0x201D:  // curly double quotes
    case 0x00AB: case 0x00BB: case 0x00BF: case 0x00A1:
      return true;
    default:
      return false;
  }
}

std::string normalize_word(std::string_view word) {
  std::u32string cps = text::decode_utf8(word);
  for (auto& c : cps) {
    c = text::to_lower(c);
    if (c == 0x2019) c = U'\'';
  }
  size_t begin = 0;
  size_t end = cps.size();
  while (begin < end && is_edge_punct(cps[begin])) ++begin;
  while (end > begin && is_edge_punct(cps[end - 1])) --end;
  return text::encode_utf8(std::u32string_view(cps).substr(begin, end - begin));
}

}  // namespace

std::vector<SurfaceToken> normalize_with_surface(std::string_view text) {
  std::vector<SurfaceToken> out;
  for (auto& word : text::split_whitespace(text)) {
    std::string norm = normalize_word(word);
    if (!norm.empty()) out.push_back({std::move(norm), std::move(word)});
  }
  return out;
}

NormalizedTokens normalize_for_wer(std::string_view text) {
  NormalizedTokens out;
  for (auto& t : normalize_with_surface(text)) out.tokens.push_back(std::move(t.norm));
  return out;
}

std::vector<std::string> AlignmentResult::ref_tokens() const {
  std::vector<std::string> out;
  for (const auto& op : ops) {
    if (op.kind != EditOp::Kind::kInsertion) out.push_back(op.ref);
  }
  return out;
}

std::vector<std::string> AlignmentResult::hyp_tokens() const {
  std::vector<std::string> out;
  for (const auto& op : ops) {
    if (op.kind != EditOp::Kind::kDeletion) out.push_back(op.hyp);
  }
  return out;
}

AlignmentResult align(const NormalizedTokens& ref_tokens, const NormalizedTokens& hyp_tokens) {
  const auto& ref = ref_tokens.tokens;
  const auto& hyp = hyp_tokens.tokens;
  const size_t n = ref.size();
  const size_t m = hyp.size();
  const size_t stride = m + 1;
  std::vector<int> cost((n + 1) * stride);
  auto at = [&](size_t i, size_t j) -> int& { return cost[i * stride + j]; };
  for (size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    at(i, 0) = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      int diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i, j - 1) + 1, at(i - 1, j) + 1});
    }
  }

  AlignmentResult result;
  result.n_ref = static_cast<int>(n);
  size_t i = n;
  size_t j = m;
  while (i > 0 || j > 0) {
    const int here = at(i, j);
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && at(i - 1, j - 1) == here) {
      result.ops.push_back({EditOp::Kind::kMatch, ref[i - 1], hyp[j - 1]});
      --i;
      --j;
    } else if (i > 0 && j > 0 && at(i - 1, j - 1) + 1 == here) {
      result.ops.push_back({EditOp::Kind::kSubstitution, ref[i - 1], hyp[j - 1]});
      ++result.n_sub;
      --i;
      --j;
    } else if (j > 0 && at(i, j - 1) + 1 == here) {
      result.ops.push_back({EditOp::Kind::kInsertion, {}, hyp[j - 1]});
      ++result.n_ins;
      --j;
    } else {
      result.ops.push_back({EditOp::Kind::kDeletion, ref[i - 1], {}});
      ++result.n_del;
      --i;
    }
  }
  std::reverse(result.ops.begin(), result.ops.end());
  return result;
}

int edit_distance(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  const auto& longer = ref.size() >= hyp.size() ? ref : hyp;
  const auto& shorter = ref.size() >= hyp.size() ? hyp : ref;
  std::vector<int> row(shorter.size() + 1);
  for (size_t j = 0; j <= shorter.size(); ++j) row[j] = static_cast<int>(j);
  for (size_t i = 1; i <= longer.size(); ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (size_t j = 1; j <= shorter.size(); ++j) {
      int up = row[j];
      row[j] = std::min({diag + (longer[i - 1] == shorter[j - 1] ? 0 : 1), up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[shorter.size()];
}

WerResult compute_wer(const AlignmentResult& alignment) {
  if (alignment.n_ref <= 0) {
    throw DataError("WER is undefined for an empty reference");
  }
  WerResult r;
  double errors = static_cast<double>(alignment.distance());
  r.wer = std::min(100.0, 100.0 * errors / static_cast<double>(alignment.n_ref));
  r.word_accuracy = 1.0 - r.wer / 100.0;
  return r;
}

}  // namespace asreval
