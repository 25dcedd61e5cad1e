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
#include <unordered_set>
#include <vector>

#include "asreval/align.hpp"
#include "asreval/corpus.hpp"

namespace asreval {

// Lexical resources behind the error-type rules. All entries lowercase.
struct ClassifierResources {
  // Contracted form -> expansion ("i'm" -> {"i", "am"}).
  std::unordered_map<std::string, std::vector<std::string>> contractions;
  // Word -> index of its homophone set.
  std::unordered_map<std::string, std::size_t> homophone_set_of;
  std::size_t homophone_set_count = 0;
  // Symmetric spelling variants ("color" <-> "colour").
  std::unordered_map<std::string, std::unordered_set<std::string>> spelling_variants;
  std::unordered_set<std::string> proper_nouns;

  // The lists compiled into the library.
  static ClassifierResources defaults();
  // Loads from a directory holding contractions.tsv, homophones.txt,
  // spellings.tsv and proper_nouns.txt; missing files fall back to the
  // compiled-in defaults.
  static ClassifierResources load_dir(const std::filesystem::path& dir);

  void add_contractions(std::string_view tsv);
  void add_homophones(std::string_view lines);
  void add_spellings(std::string_view tsv);
  void add_proper_nouns(std::string_view lines);

  bool homophones(const std::string& a, const std::string& b) const;
  bool spelling_pair(const std::string& a, const std::string& b) const;
};

// Rewrites tokens into a canonical spoken form for the normalization rule:
// accents folded, punctuation dropped, digits, times ("9:30", "4:00"),
// percentages and ordinal suffixes spelled out for values up to 9999, and
// "o'clock" removed.
std::vector<std::string> canonical_words(const std::vector<std::string>& tokens);
std::string spell_cardinal(int n);

// Levenshtein distance over code points.
int char_edit_distance(std::string_view a, std::string_view b);

// Assigns error types to a reference/hypothesis pair. Each run of
// consecutive non-match edits is labelled by the first rule that fits:
// contraction, normalization, homophone, spelling, proper noun,
// repetition, deletion, then word error as the catch-all. Throws
// DataError if `alignment` was not computed from this pair.
ErrorTypeSet classify(std::string_view ref, std::string_view hyp, const AlignmentResult& alignment,
                      const ClassifierResources& resources);

}  // namespace asreval
