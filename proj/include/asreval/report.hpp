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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asreval/annotation.hpp"
#include "asreval/bertscore.hpp"
#include "asreval/classify.hpp"
#include "asreval/corpus.hpp"
#include "asreval/embed.hpp"
#include "json.hpp"

namespace asreval::report {

inline constexpr int kSchemaVersion = 1;

struct BackendSpec {
  enum class Kind { kNone, kStatic, kModel };
  Kind kind = Kind::kNone;
  std::filesystem::path path;
  int layer = 9;
  std::filesystem::path vocab;  // static backend only; optional

  // "static:<tsv>" or "model:<path>[:layer]".
  static BackendSpec parse(const std::string& spec);
  std::unique_ptr<EmbeddingBackend> load() const;
};

struct ScoreConfig {
  std::filesystem::path input;
  CorpusFormat format = CorpusFormat::kJsonl;
  bool bertscore = true;
  BackendSpec backend;
  // "refs" builds idf from the corpus references; anything else is an idf file.
  std::string idf_source = "refs";
  std::filesystem::path out_dir;
  std::filesystem::path resources_dir;  // empty: compiled-in defaults
  int jobs = 0;                         // 0: all available threads
};

// Metric set from "wer,bertscore"; throws UsageError for unknown names or
// an empty list. WER is always computed since classification needs the
// alignment.
bool parse_metrics(const std::string& list);

// Per-utterance alignment, WER, error types and (optionally) BERTScore.
// Output order follows the corpus. Runs `jobs` workers.
std::vector<ScoredUtterance> score_corpus(const std::vector<Utterance>& corpus,
                                          const ClassifierResources& resources,
                                          const EmbeddingBackend* backend, const IdfTable* idf, int jobs);

nlohmann::ordered_json summarize_scores(const std::vector<ScoredUtterance>& results, bool bertscore);

// Writes <out>/scored.jsonl and <out>/summary.json; removes both if any
// step fails. Returns the summary.
nlohmann::ordered_json cmd_score(const ScoreConfig& config);

// Attaches annotations to scored records: the earliest completed record per
// utterance supplies the assessment and, when non-empty, the error types.
// Throws DataError for annotations naming unknown utterances.
std::vector<ScoredUtterance> merge_annotations(std::vector<ScoredUtterance> scored,
                                               const std::vector<annotation::AnnotationRecord>& records);

// ANOVA, ordinal regression (word_accuracy, f_bert, both), AIC ranking,
// kappa over double-annotated utterances and boxplot summaries. Throws
// DataError without assessments or with fewer than two levels, and
// NumericalError when a regression has no finite maximum (separation).
// SVGs go to `svg_dir` when given.
nlohmann::ordered_json analyze(const std::vector<ScoredUtterance>& scored,
                               const std::vector<annotation::AnnotationRecord>& records,
                               const std::filesystem::path& svg_dir = {});

// Writes <out>/analysis.json and the boxplot SVGs.
nlohmann::ordered_json cmd_analyze(const std::filesystem::path& scored_path,
                                   const std::filesystem::path& annotations_path,
                                   const std::filesystem::path& out_dir);

}  // namespace asreval::report
