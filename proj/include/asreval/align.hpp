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

#include <string>
#include <string_view>
#include <vector>

namespace asreval {

// Whitespace-free, non-empty word tokens ready for alignment.
struct NormalizedTokens {
  std::vector<std::string> tokens;

  bool operator==(const NormalizedTokens&) const = default;
};

// A normalized token together with the whitespace-delimited word it came
// from, which keeps case and punctuation for the error classifier.
struct SurfaceToken {
  std::string norm;
  std::string surface;
};

// Lowercases, strips leading/trailing punctuation from each word and keeps
// apostrophes, diacritics and intra-token symbols ("9:30", "100%").
// Words that are pure punctuation disappear.
NormalizedTokens normalize_for_wer(std::string_view text);
std::vector<SurfaceToken> normalize_with_surface(std::string_view text);

struct EditOp {
  enum class Kind { kMatch, kSubstitution, kInsertion, kDeletion };

  Kind kind = Kind::kMatch;
  std::string ref;  // empty for insertions
  std::string hyp;  // empty for deletions

  bool operator==(const EditOp&) const = default;
};

struct AlignmentResult {
  std::vector<EditOp> ops;
  int n_ref = 0;
  int n_sub = 0;
  int n_ins = 0;
  int n_del = 0;

  int distance() const { return n_sub + n_ins + n_del; }
  int n_match() const { return n_ref - n_sub - n_del; }
  // Token sequences recovered from the edit script.
  std::vector<std::string> ref_tokens() const;
  std::vector<std::string> hyp_tokens() const;
};

// Minimum edit distance alignment with unit costs. Among equal-cost paths
// the backtrace takes a match when the tokens agree and otherwise prefers
// substitution, then insertion, then deletion.
AlignmentResult align(const NormalizedTokens& ref, const NormalizedTokens& hyp);

// Word-level edit distance only, O(min(n, m)) memory.
int edit_distance(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

struct WerResult {
  double wer = 0.0;            // percent, capped at 100
  double word_accuracy = 1.0;  // 1 - wer / 100
};

// Throws DataError when the reference has no tokens.
WerResult compute_wer(const AlignmentResult& alignment);

}  // namespace asreval
