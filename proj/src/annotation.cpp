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

#include "asreval/annotation.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>


namespace asreval::annotation {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::int64_t wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::string task_name(std::size_t i) {
  std::string digits = std::to_string(i + 1);
  return "t" + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits;
}

ServiceError protocol_error(const AnnotationTask& t, std::string_view action) {
  return ServiceError(409, "protocol_order",
                      std::string(action) + " not allowed while task " + t.task_id + " is " +
                          std::string(to_string(t.state)));
}

}  // namespace

std::string_view to_string(TaskState s) {
  switch (s) {
    case TaskState::kOpen: return "open";
    case TaskState::kAssigned: return "assigned";
    case TaskState::kGuessed: return "guessed";
    case TaskState::kRevealed: return "revealed";
    case TaskState::kCompleted: return "completed";
  }
  return "open";
}

std::size_t overlap_count(std::size_t n, double ratio) {
  if (ratio < 0.0 || ratio > 1.0) throw UsageError("overlap ratio must lie in [0, 1]");
  // Guard against 0.05 * 100 landing a hair above 5.
  double exact = ratio * static_cast<double>(n);
  auto count = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::min(count, n);
}

std::map<std::string, std::string> load_annotator_tokens(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::map<std::string, std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw DataError(path.string() + ": expected annotator_id<TAB>token, got '" + line + "'");
    }
    if (!tokens.emplace(line.substr(tab + 1), line.substr(0, tab)).second) {
      throw DataError(path.string() + ": duplicate token");
    }
  }
  return tokens;
}

ordered_json to_json(const AnnotationRecord& r) {
  ordered_json j;
  j["task_id"] = r.task_id;
  j["utterance_id"] = r.utterance_id;
  j["annotator_id"] = r.annotator_id;
  j["guess_text"] = r.guess_text;
  j["assessment"] = level(r.assessment);
  auto types = ordered_json::array();
  for (ErrorType t : r.error_types) types.push_back(to_string(t));
  j["error_types"] = std::move(types);
  j["created_at"] = r.created_at;
  j["guessed_at"] = r.guessed_at;
  j["revealed_at"] = r.revealed_at;
  j["completed_at"] = r.completed_at;
  return j;
}

AnnotationRecord record_from_json(const json& j) {
  if (!j.is_object()) throw DataError("annotation record must be a JSON object");
  AnnotationRecord r;
  try {
    r.task_id = j.value("task_id", std::string());
    r.utterance_id = j.at("utterance_id").get<std::string>();
    r.annotator_id = j.value("annotator_id", std::string());
    r.guess_text = j.value("guess_text", std::string());
    if (!j.contains("assessment") || !j["assessment"].is_number_integer()) {
      throw DataError("annotation for '" + r.utterance_id + "' lacks an integer assessment");
    }
    r.assessment = assessment_from_level(j["assessment"].get<long long>());
    if (j.contains("error_types")) {
      for (const auto& t : j["error_types"]) r.error_types.insert(parse_error_type(t.get<std::string>()));
    }
    r.created_at = j.value("created_at", std::int64_t{0});
    r.guessed_at = j.value("guessed_at", std::int64_t{0});
    r.revealed_at = j.value("revealed_at", std::int64_t{0});
    r.completed_at = j.value("completed_at", std::int64_t{0});
  } catch (const json::exception& e) {
    throw DataError(std::string("bad annotation record: ") + e.what());
  }
  return r;
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<AnnotationRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

AnnotationStore::AnnotationStore(std::vector<Utterance> corpus, std::filesystem::path log_path,
                                 StoreOptions options, Clock clock)
    : corpus_(std::move(corpus)),
      log_path_(std::move(log_path)),
      options_(std::move(options)),
      clock_(clock ? std::move(clock) : Clock(wall_clock_ms)) {
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    if (!utterance_index_.emplace(corpus_[i].id, i).second) {
      throw DataError("duplicate utterance id '" + corpus_[i].id + "'");
    }
  }
  for (const auto& [token, id] : options_.tokens) annotator_ids_[id] = token;
  bool existing = std::filesystem::exists(log_path_) && std::filesystem::file_size(log_path_) > 0;
  if (existing) replay();
  log_.open(log_path_, std::ios::binary | std::ios::app);
  if (!log_) throw DataError("cannot open event log '" + log_path_.string() + "'");
  // A log holding only a torn init record is empty after replay.
  if (!existing || std::filesystem::file_size(log_path_) == 0) create_slots();
}

void AnnotationStore::create_slots() {
  const std::size_t n = corpus_.size();
  const std::size_t doubles = overlap_count(n, options_.overlap_ratio);
  // Seeded Fisher-Yates picks the doubly annotated utterances.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(options_.seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  std::vector<bool> overlap(n, false);
  for (std::size_t i = 0; i < doubles; ++i) overlap[order[i]] = true;

  ordered_json slots = ordered_json::array();
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    slots.push_back({{"task_id", task_name(next++)}, {"utterance_id", corpus_[i].id}, {"is_overlap", overlap[i]}});
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (overlap[i]) {
      slots.push_back({{"task_id", task_name(next++)}, {"utterance_id", corpus_[i].id}, {"is_overlap", true}});
    }
  }
  ordered_json init = {{"event", "init"}, {"overlap_ratio", options_.overlap_ratio},
                       {"seed", options_.seed}, {"slots", std::move(slots)}};
  append(init);
  apply(init);
}

void AnnotationStore::replay() {
  const std::string content = read_file(log_path_);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    ++line_no;
    std::size_t end = content.find('\n', pos);
    const bool last = end == std::string::npos;
    if (last) end = content.size();
    const std::string line = content.substr(pos, end - pos);
    json event;
    bool parsed = true;
    if (!line.empty()) {
      try {
        event = json::parse(line);
      } catch (const json::parse_error&) {
        parsed = false;
      }
    }
    if (!parsed || (last && !line.empty())) {
      // A torn final write from a crash (no newline, or unparseable last
      // line) is cut off so later appends start on a clean line. Anything
      // earlier is corruption.
      if (end + 1 < content.size()) {
        throw DataError(log_path_.string() + ": corrupt event at line " + std::to_string(line_no));
      }
      if (parsed) apply(event);
      std::filesystem::resize_file(log_path_, parsed ? content.size() : pos);
      if (parsed) {
        std::ofstream(log_path_, std::ios::binary | std::ios::app) << '\n';
      }
      break;
    }
    if (!line.empty()) apply(event);
    pos = end + 1;
  }
  if (tasks_.empty() && !corpus_.empty() && std::filesystem::file_size(log_path_) > 0) {
    throw DataError(log_path_.string() + ": event log lacks an init record");
  }
}

void AnnotationStore::append(const ordered_json& event) {
  if (!log_.is_open()) return;
  log_ << event.dump() << '\n';
  log_.flush();
  if (!log_) throw DataError("event log write failed");
}

void AnnotationStore::apply(const json& event) {
  const std::string kind = event.at("event").get<std::string>();
  if (kind == "init") {
    tasks_.clear();
    task_index_.clear();
    for (const auto& s : event.at("slots")) {
      AnnotationTask t;
      t.task_id = s.at("task_id").get<std::string>();
      t.utterance_id = s.at("utterance_id").get<std::string>();
      t.is_overlap = s.at("is_overlap").get<bool>();
      if (!utterance_index_.count(t.utterance_id)) {
        throw DataError("event log refers to unknown utterance '" + t.utterance_id + "'");
      }
      task_index_[t.task_id] = tasks_.size();
      tasks_.push_back(std::move(t));
    }
    return;
  }
  auto it = task_index_.find(event.at("task_id").get<std::string>());
  if (it == task_index_.end()) throw DataError("event log refers to unknown task");
  AnnotationTask& t = tasks_[it->second];
  const std::int64_t at = event.at("at").get<std::int64_t>();
  if (kind == "assign") {
    t.annotator_id = event.at("annotator").get<std::string>();
    t.state = TaskState::kAssigned;
    t.created_at = at;
  } else if (kind == "guess") {
    t.guess_text = event.at("guess").get<std::string>();
    t.state = TaskState::kGuessed;
    t.guessed_at = at;
  } else if (kind == "reveal") {
    t.state = TaskState::kRevealed;
    t.revealed_at = at;
  } else if (kind == "assessment") {
    t.assessment = assessment_from_level(event.at("assessment").get<long long>());
    t.error_types.clear();
    for (const auto& e : event.at("error_types")) t.error_types.insert(parse_error_type(e.get<std::string>()));
    t.state = TaskState::kCompleted;
    t.completed_at = at;
  } else {
    throw DataError("unknown event kind '" + kind + "'");
  }
}

std::int64_t AnnotationStore::stamp(std::int64_t after) { return std::max(clock_(), after + 1); }

std::string AnnotationStore::annotator_for_token(const std::string& token) const {
  auto it = options_.tokens.find(token);
  if (it == options_.tokens.end()) throw ServiceError(401, "unauthorized", "unknown bearer token");
  return it->second;
}

bool AnnotationStore::is_annotator(const std::string& annotator_id) const {
  return annotator_ids_.count(annotator_id) > 0;
}

AnnotationTask& AnnotationStore::owned_task(const std::string& task_id, const std::string& annotator_id) {
  if (!is_annotator(annotator_id)) throw ServiceError(401, "unknown_annotator", "unknown annotator '" + annotator_id + "'");
  auto it = task_index_.find(task_id);
  if (it == task_index_.end()) throw ServiceError(404, "no_such_task", "no task '" + task_id + "'");
  AnnotationTask& t = tasks_[it->second];
  if (t.state == TaskState::kOpen || t.annotator_id != annotator_id) {
    throw ServiceError(403, "not_owner", "task " + task_id + " is not assigned to " + annotator_id);
  }
  return t;
}

NextTask AnnotationStore::next_task(const std::string& annotator_id) {
  std::lock_guard lock(mu_);
  if (!is_annotator(annotator_id)) throw ServiceError(401, "unknown_annotator", "unknown annotator '" + annotator_id + "'");
  auto view = [&](const AnnotationTask& t) {
    return NextTask{t.task_id, t.utterance_id, corpus_[utterance_index_.at(t.utterance_id)].hypothesis, t.state};
  };
  for (const auto& t : tasks_) {
    if (t.annotator_id == annotator_id && t.state != TaskState::kOpen && t.state != TaskState::kCompleted) {
      return view(t);
    }
  }
  std::unordered_map<std::string, bool> seen;
  for (const auto& t : tasks_) {
    if (t.annotator_id == annotator_id) seen[t.utterance_id] = true;
  }
  for (auto& t : tasks_) {
    if (t.state != TaskState::kOpen || seen.count(t.utterance_id)) continue;
    ordered_json event = {{"event", "assign"}, {"task_id", t.task_id}, {"annotator", annotator_id}, {"at", stamp(0)}};
    append(event);
    apply(event);
    return view(t);
  }
  throw ServiceError(404, "no_tasks", "no tasks remaining for " + annotator_id);
}

void AnnotationStore::submit_guess(const std::string& task_id, const std::string& annotator_id,
                                   const std::string& guess) {
  std::lock_guard lock(mu_);
  AnnotationTask& t = owned_task(task_id, annotator_id);
  if (t.state == TaskState::kGuessed && t.guess_text == guess) return;
  if (t.state != TaskState::kAssigned) throw protocol_error(t, "guess");
  ordered_json event = {{"event", "guess"}, {"task_id", task_id}, {"annotator", annotator_id},
                        {"guess", guess}, {"at", stamp(t.created_at)}};
  append(event);
  apply(event);
}

std::string AnnotationStore::reveal(const std::string& task_id, const std::string& annotator_id) {
  std::lock_guard lock(mu_);
  AnnotationTask& t = owned_task(task_id, annotator_id);
  const std::string& reference = corpus_[utterance_index_.at(t.utterance_id)].reference;
  if (t.state == TaskState::kRevealed || t.state == TaskState::kCompleted) return reference;
  if (t.state != TaskState::kGuessed) throw protocol_error(t, "reveal");
  ordered_json event = {{"event", "reveal"}, {"task_id", task_id}, {"annotator", annotator_id},
                        {"at", stamp(t.guessed_at)}};
  append(event);
  apply(event);
  return reference;
}

void AnnotationStore::submit_assessment(const std::string& task_id, const std::string& annotator_id,
                                        long long level_value, const std::vector<std::string>& error_types) {
  std::lock_guard lock(mu_);
  AnnotationTask& t = owned_task(task_id, annotator_id);
  Assessment assessment;
  ErrorTypeSet types;
  try {
    assessment = assessment_from_level(level_value);
    for (const auto& name : error_types) types.insert(parse_error_type(name));
  } catch (const DataError& e) {
    throw ServiceError(400, "invalid", e.what());
  }
  if (t.state == TaskState::kCompleted && t.assessment == assessment && t.error_types == types) return;
  if (t.state != TaskState::kRevealed) throw protocol_error(t, "assessment");
  ordered_json names = ordered_json::array();
  for (ErrorType type : types) names.push_back(to_string(type));
  ordered_json event = {{"event", "assessment"}, {"task_id", task_id}, {"annotator", annotator_id},
                        {"assessment", level_value}, {"error_types", std::move(names)},
                        {"at", stamp(t.revealed_at)}};
  append(event);
  apply(event);
}

Progress AnnotationStore::progress(const std::string& annotator_id) const {
  std::lock_guard lock(mu_);
  Progress p;
  p.total = tasks_.size();
  for (const auto& t : tasks_) {
    if (t.state == TaskState::kCompleted) {
      ++p.completed;
      if (t.annotator_id == annotator_id) ++p.completed_by_annotator;
    } else if (t.state != TaskState::kOpen) {
      ++p.in_flight;
    }
  }
  return p;
}

std::vector<AnnotationRecord> AnnotationStore::export_records() const {
  std::lock_guard lock(mu_);
  std::vector<AnnotationRecord> out;
  for (const auto& t : tasks_) {
    if (t.state != TaskState::kCompleted) continue;
    out.push_back({t.task_id, t.utterance_id, t.annotator_id, t.guess_text, *t.assessment, t.error_types,
                   t.created_at, t.guessed_at, t.revealed_at, t.completed_at});
  }
  return out;
}

std::string AnnotationStore::export_jsonl() const {
  std::string out;
  for (const auto& r : export_records()) out += to_json(r).dump() + "\n";
  return out;
}

std::vector<AnnotationTask> AnnotationStore::tasks() const {
  std::lock_guard lock(mu_);
  return tasks_;
}

}  // namespace asreval::annotation
