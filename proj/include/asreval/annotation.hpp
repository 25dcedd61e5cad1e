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

// Staged expert-assessment protocol: the annotator first sees only the
// recognizer output, records a guess at the intended meaning, then gets
// the reference transcript and rates the error. A fraction of utterances
// is assigned to two annotators for agreement statistics.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "asreval/corpus.hpp"
#include "asreval/error.hpp"
#include "json.hpp"

namespace asreval::annotation {

enum class TaskState { kOpen, kAssigned, kGuessed, kRevealed, kCompleted };

std::string_view to_string(TaskState s);

// Protocol failure with an HTTP-style status and a stable error code.
class ServiceError : public Error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : Error(message), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

struct AnnotationTask {
  std::string task_id;
  std::string utterance_id;
  bool is_overlap = false;
  TaskState state = TaskState::kOpen;
  std::string annotator_id;
  std::string guess_text;
  std::optional<Assessment> assessment;
  ErrorTypeSet error_types;
  std::int64_t created_at = 0;
  std::int64_t guessed_at = 0;
  std::int64_t revealed_at = 0;
  std::int64_t completed_at = 0;
};

// A completed task, as exported for analysis.
struct AnnotationRecord {
  std::string task_id;
  std::string utterance_id;
  std::string annotator_id;
  std::string guess_text;
  Assessment assessment = Assessment::kPreserved;
  ErrorTypeSet error_types;
  std::int64_t created_at = 0;
  std::int64_t guessed_at = 0;
  std::int64_t revealed_at = 0;
  std::int64_t completed_at = 0;
};

nlohmann::ordered_json to_json(const AnnotationRecord& r);
AnnotationRecord record_from_json(const nlohmann::json& j);
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);

struct NextTask {
  std::string task_id;
  std::string utterance_id;
  std::string hypothesis;
  TaskState state = TaskState::kAssigned;
};

struct Progress {
  std::size_t total = 0;
  std::size_t completed = 0;
  std::size_t in_flight = 0;
  std::size_t completed_by_annotator = 0;
};

struct StoreOptions {
  double overlap_ratio = 0.05;
  std::uint64_t seed = 1;
  // Bearer token -> annotator id.
  std::map<std::string, std::string> tokens;
};

// Number of utterances assigned to two annotators: ceil(ratio * n).
std::size_t overlap_count(std::size_t n, double ratio);

// Reads "annotator_id<TAB>token" lines.
std::map<std::string, std::string> load_annotator_tokens(const std::filesystem::path& path);

// Task pool plus append-only JSONL event log. Every mutation is written and
// flushed before it is applied; opening an existing log replays it. All
// public methods are thread-safe.
class AnnotationStore {
 public:
  using Clock = std::function<std::int64_t()>;

  AnnotationStore(std::vector<Utterance> corpus, std::filesystem::path log_path, StoreOptions options,
                  Clock clock = {});

  // Throws ServiceError(401) for an unknown token.
  std::string annotator_for_token(const std::string& token) const;
  bool is_annotator(const std::string& annotator_id) const;

  NextTask next_task(const std::string& annotator_id);
  void submit_guess(const std::string& task_id, const std::string& annotator_id, const std::string& guess);
  std::string reveal(const std::string& task_id, const std::string& annotator_id);
  void submit_assessment(const std::string& task_id, const std::string& annotator_id, long long level,
                         const std::vector<std::string>& error_types);

  Progress progress(const std::string& annotator_id) const;
  std::vector<AnnotationRecord> export_records() const;
  std::string export_jsonl() const;

  // Snapshot of the task table, for tests and diagnostics.
  std::vector<AnnotationTask> tasks() const;

 private:
  AnnotationTask& owned_task(const std::string& task_id, const std::string& annotator_id);
  void append(const nlohmann::ordered_json& event);
  void apply(const nlohmann::json& event);
  void create_slots();
  void replay();
  std::int64_t stamp(std::int64_t after);

  mutable std::mutex mu_;
  std::vector<Utterance> corpus_;
  std::unordered_map<std::string, std::size_t> utterance_index_;
  std::filesystem::path log_path_;
  std::ofstream log_;
  StoreOptions options_;
  std::map<std::string, std::string> annotator_ids_;  // id -> token
  Clock clock_;
  std::vector<AnnotationTask> tasks_;
  std::unordered_map<std::string, std::size_t> task_index_;
};

}  // namespace asreval::annotation
