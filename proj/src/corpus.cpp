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

#include "asreval/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "asreval/error.hpp"

namespace asreval {
namespace {

using nlohmann::json;

constexpr std::string_view kErrorTypeNames[kNumErrorTypes] = {
    "deletion", "contraction", "normalization", "homophone",
    "spelling", "proper_noun", "repetition",    "word_error",
};

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string at_line(size_t line) { return "line " + std::to_string(line) + ": "; }

void check_utterance(const Utterance& u, size_t line) {
  if (u.id.empty()) throw DataError(at_line(line) + "empty id");
  if (u.reference.empty()) throw DataError(at_line(line) + "empty reference for id '" + u.id + "'");
}

void check_unique(std::vector<Utterance>& out, std::unordered_set<std::string>& seen,
                  Utterance u, size_t line) {
  check_utterance(u, line);
  if (!seen.insert(u.id).second) {
    throw DataError(at_line(line) + "duplicate id '" + u.id + "'");
  }
  out.push_back(std::move(u));
}

std::string required_string(const json& obj, const char* key, size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw DataError(at_line(line) + "missing required field '" + key + "'");
  }
  if (!it->is_string()) {
    throw DataError(at_line(line) + "field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::string optional_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

Utterance utterance_from_json(const json& obj, size_t line) {
  if (!obj.is_object()) throw DataError(at_line(line) + "expected a JSON object");
  Utterance u;
  u.id = required_string(obj, "id", line);
  u.speaker_id = optional_string(obj, "speaker_id");
  u.severity = parse_severity(optional_string(obj, "severity"));
  u.reference = required_string(obj, "reference", line);
  u.hypothesis = required_string(obj, "hypothesis", line);
  return u;
}

// Splits JSONL content into (line number, text) pairs, skipping blank lines.
template <typename Fn>
void for_each_line(std::string_view content, Fn&& fn) {
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    bool blank = std::all_of(line.begin(), line.end(),
                             [](char c) { return c == ' ' || c == '\t'; });
    if (!blank) fn(line_no, line);
    if (end == content.size()) break;
    pos = end + 1;
  }
}

json parse_json_line(std::string_view line, size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(at_line(line_no) + "malformed JSON: " + e.what());
  }
}

// RFC 4180 records: quoted fields may contain separators, doubled quotes
// and newlines.
std::vector<std::pair<size_t, std::vector<std::string>>> parse_csv_records(std::string_view s) {
  std::vector<std::pair<size_t, std::vector<std::string>>> records;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t line = 1;
  size_t record_line = 1;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    bool empty = row.size() == 1 && row[0].empty();
    if (!empty) records.emplace_back(record_line, std::move(row));
    row.clear();
  };
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < s.size() && s[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      continue;
    } else if (c == '\n') {
      end_record();
      ++line;
      record_line = line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw DataError(at_line(record_line) + "unterminated quoted CSV field");
  if (!field.empty() || !row.empty()) end_record();
  return records;
}

std::optional<double> optional_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw DataError(std::string("field '") + key + "' must be a number or null");
  return it->get<double>();
}

double required_number(const json& j, const char* key) {
  auto v = optional_number(j, key);
  if (!v) throw DataError(std::string("missing required field '") + key + "'");
  return *v;
}

}  // namespace

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::kMild: return "mild";
    case Severity::kModerate: return "moderate";
    case Severity::kSevere: return "severe";
    case Severity::kUnknown: break;
  }
  return "unknown";
}

Severity parse_severity(std::string_view s) {
  std::string v = ascii_lower(s);
  if (v == "mild") return Severity::kMild;
  if (v == "moderate") return Severity::kModerate;
  if (v == "severe") return Severity::kSevere;
  return Severity::kUnknown;
}

std::string_view to_string(ErrorType t) { return kErrorTypeNames[static_cast<int>(t)]; }

ErrorType parse_error_type(std::string_view s) {
  for (int i = 0; i < kNumErrorTypes; ++i) {
    if (kErrorTypeNames[i] == s) return static_cast<ErrorType>(i);
  }
  throw DataError("unknown error type '" + std::string(s) + "'");
}

const std::vector<ErrorType>& all_error_types() {
  static const std::vector<ErrorType> types = [] {
    std::vector<ErrorType> v;
    for (int i = 0; i < kNumErrorTypes; ++i) v.push_back(static_cast<ErrorType>(i));
    return v;
  }();
  return types;
}

int level(Assessment a) { return static_cast<int>(a); }

Assessment assessment_from_level(long long level) {
  if (level < 0 || level > 2) {
    throw DataError("assessment level must be 0, 1 or 2 (got " + std::to_string(level) + ")");
  }
  return static_cast<Assessment>(level);
}

CorpusFormat parse_corpus_format(std::string_view s) {
  std::string v = ascii_lower(s);
  if (v == "jsonl") return CorpusFormat::kJsonl;
  if (v == "csv") return CorpusFormat::kCsv;
  throw UsageError("unknown corpus format '" + std::string(s) + "' (expected jsonl or csv)");
}

std::vector<Utterance> parse_corpus_jsonl(std::string_view content) {
  std::vector<Utterance> out;
  std::unordered_set<std::string> seen;
  for_each_line(content, [&](size_t line_no, std::string_view line) {
    check_unique(out, seen, utterance_from_json(parse_json_line(line, line_no), line_no), line_no);
  });
  return out;
}

std::vector<Utterance> parse_corpus_csv(std::string_view content) {
  auto records = parse_csv_records(content);
  std::vector<Utterance> out;
  if (records.empty()) return out;
  const auto& header = records.front().second;
  auto column = [&](std::string_view name) -> std::optional<size_t> {
    for (size_t i = 0; i < header.size(); ++i) {
      if (ascii_lower(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  auto id_col = column("id");
  auto ref_col = column("reference");
  auto hyp_col = column("hypothesis");
  auto spk_col = column("speaker_id");
  auto sev_col = column("severity");
  for (auto [name, col] : {std::pair{"id", id_col}, {"reference", ref_col}, {"hypothesis", hyp_col}}) {
    if (!col) throw DataError(at_line(1) + "CSV header lacks required column '" + name + "'");
  }
  std::unordered_set<std::string> seen;
  for (size_t r = 1; r < records.size(); ++r) {
    const auto& [line_no, row] = records[r];
    if (row.size() != header.size()) {
      throw DataError(at_line(line_no) + "expected " + std::to_string(header.size()) +
                      " CSV fields, found " + std::to_string(row.size()));
    }
    Utterance u;
    u.id = row[*id_col];
    u.reference = row[*ref_col];
    u.hypothesis = row[*hyp_col];
    if (spk_col) u.speaker_id = row[*spk_col];
    if (sev_col) u.severity = parse_severity(row[*sev_col]);
    check_unique(out, seen, std::move(u), line_no);
  }
  return out;
}

std::vector<Utterance> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::string content = read_file(path);
  try {
    return format == CorpusFormat::kJsonl ? parse_corpus_jsonl(content) : parse_corpus_csv(content);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void validate_result(const ScoredUtterance& r) {
  if (!(r.wer >= 0.0 && r.wer <= 100.0)) {
    throw DataError("result '" + r.utterance.id + "': wer outside [0, 100]");
  }
  if (std::abs(r.word_accuracy - (1.0 - r.wer / 100.0)) > 1e-12) {
    throw DataError("result '" + r.utterance.id + "': word_accuracy != 1 - wer/100");
  }
  if (r.f_bert && !(*r.f_bert >= -1.0 && *r.f_bert <= 1.0)) {
    throw DataError("result '" + r.utterance.id + "': f_bert outside [-1, 1]");
  }
}

nlohmann::ordered_json to_json(const ScoredUtterance& r) {
  nlohmann::ordered_json j;
  j["id"] = r.utterance.id;
  j["speaker_id"] = r.utterance.speaker_id;
  j["severity"] = to_string(r.utterance.severity);
  j["reference"] = r.utterance.reference;
  j["hypothesis"] = r.utterance.hypothesis;
  j["word_accuracy"] = r.word_accuracy;
  j["wer"] = r.wer;
  j["n_ref"] = r.n_ref;
  j["n_sub"] = r.n_sub;
  j["n_ins"] = r.n_ins;
  j["n_del"] = r.n_del;
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  j["precision"] = opt(r.precision);
  j["recall"] = opt(r.recall);
  j["f_bert"] = opt(r.f_bert);
  auto types = nlohmann::ordered_json::array();
  for (ErrorType t : r.error_types) types.push_back(to_string(t));
  j["error_types"] = std::move(types);
  j["assessment"] = r.assessment ? nlohmann::ordered_json(level(*r.assessment))
                                 : nlohmann::ordered_json(nullptr);
  return j;
}

ScoredUtterance scored_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("expected a JSON object");
  ScoredUtterance r;
  r.utterance = utterance_from_json(j, 0);
  r.word_accuracy = required_number(j, "word_accuracy");
  r.wer = required_number(j, "wer");
  r.n_ref = static_cast<int>(optional_number(j, "n_ref").value_or(0));
  r.n_sub = static_cast<int>(optional_number(j, "n_sub").value_or(0));
  r.n_ins = static_cast<int>(optional_number(j, "n_ins").value_or(0));
  r.n_del = static_cast<int>(optional_number(j, "n_del").value_or(0));
  r.precision = optional_number(j, "precision");
  r.recall = optional_number(j, "recall");
  r.f_bert = optional_number(j, "f_bert");
  if (auto it = j.find("error_types"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError("error_types must be an array");
    for (const auto& t : *it) {
      if (!t.is_string()) throw DataError("error_types entries must be strings");
      r.error_types.insert(parse_error_type(t.get<std::string>()));
    }
  }
  if (auto it = j.find("assessment"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw DataError("assessment must be 0, 1, 2 or null");
    r.assessment = assessment_from_level(it->get<long long>());
  }
  return r;
}

std::string results_to_jsonl(const std::vector<ScoredUtterance>& results) {
  std::string out;
  for (const auto& r : results) {
    validate_result(r);
    out += to_json(r).dump();
    out.push_back('\n');
  }
  return out;
}

void save_results(const std::vector<ScoredUtterance>& results, const std::filesystem::path& path) {
  write_file(path, results_to_jsonl(results));
}

std::vector<ScoredUtterance> load_results(const std::filesystem::path& path) {
  std::string content = read_file(path);
  std::vector<ScoredUtterance> out;
  std::unordered_set<std::string> seen;
  for_each_line(content, [&](size_t line_no, std::string_view line) {
    try {
      ScoredUtterance r = scored_from_json(parse_json_line(line, line_no));
      validate_result(r);
      if (!seen.insert(r.utterance.id).second) throw DataError("duplicate id '" + r.utterance.id + "'");
      out.push_back(std::move(r));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + at_line(line_no) + e.what());
    }
  });
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace asreval
