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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace asreval {

enum class Severity { kMild, kModerate, kSevere, kUnknown };

// Human error-severity rating: 0 meaning fully preserved, 1 mostly
// preserved, 2 meaning lost.
enum class Assessment : std::uint8_t { kPreserved = 0, kMostlyPreserved = 1, kMeaningLost = 2 };

enum class ErrorType {
  kDeletion,
  kContraction,
  kNormalization,
  kHomophone,
  kSpelling,
  kProperNoun,
  kRepetition,
  kWordError,
};

inline constexpr int kNumErrorTypes = 8;
inline constexpr int kNumAssessmentLevels = 3;

using ErrorTypeSet = std::set<ErrorType>;

std::string_view to_string(Severity s);
// Case-insensitive; anything unrecognised is kUnknown.
Severity parse_severity(std::string_view s);

std::string_view to_string(ErrorType t);
// Accepts the snake_case names ("proper_noun"); throws DataError otherwise.
ErrorType parse_error_type(std::string_view s);
const std::vector<ErrorType>& all_error_types();

int level(Assessment a);
// Throws DataError for anything outside {0, 1, 2}.
Assessment assessment_from_level(long long level);

struct Utterance {
  std::string id;
  std::string speaker_id;
  Severity severity = Severity::kUnknown;
  std::string reference;
  std::string hypothesis;

  bool operator==(const Utterance&) const = default;
};

struct ScoredUtterance {
  Utterance utterance;
  double wer = 0.0;
  double word_accuracy = 1.0;
  int n_ref = 0;
  int n_sub = 0;
  int n_ins = 0;
  int n_del = 0;
  // Absent when the semantic metric was not requested.
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_bert;
  ErrorTypeSet error_types;
  std::optional<Assessment> assessment;

  bool operator==(const ScoredUtterance&) const = default;
};

enum class CorpusFormat { kJsonl, kCsv };

CorpusFormat parse_corpus_format(std::string_view s);

// Throws DataError naming the offending line for malformed input, missing
// fields, empty references and duplicate ids.
std::vector<Utterance> load_corpus(const std::filesystem::path& path, CorpusFormat format);
std::vector<Utterance> parse_corpus_jsonl(std::string_view content);
std::vector<Utterance> parse_corpus_csv(std::string_view content);

// Checks the Word Accuracy / WER identity and value ranges.
void validate_result(const ScoredUtterance& r);

nlohmann::ordered_json to_json(const ScoredUtterance& r);
ScoredUtterance scored_from_json(const nlohmann::json& j);

std::string results_to_jsonl(const std::vector<ScoredUtterance>& results);
void save_results(const std::vector<ScoredUtterance>& results, const std::filesystem::path& path);
std::vector<ScoredUtterance> load_results(const std::filesystem::path& path);

// Reads a whole file; throws DataError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);
// Throws DataError if the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace asreval
