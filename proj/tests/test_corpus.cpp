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

#include <filesystem>
#include <random>

#include "asreval/corpus.hpp"
#include "asreval/error.hpp"
#include "doctest.h"

using namespace asreval;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  auto dir = fs::temp_directory_path() / "asreval_test_corpus";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("jsonl ingestion") {
  auto c = parse_corpus_jsonl(
      R"({"id":"u1","speaker_id":"s1","reference":"play Beyonce","hypothesis":"play Beyoncé"})");
  REQUIRE(c.size() == 1);
  CHECK(c[0].severity == Severity::kUnknown);
  CHECK(c[0].hypothesis == "play Beyoncé");

  CHECK(parse_corpus_jsonl("").empty());
  CHECK(parse_corpus_jsonl("\n\n").empty());

  const std::string dup = R"({"id":"u1","reference":"a","hypothesis":"a"})"
                          "\n"
                          R"({"id":"u1","reference":"b","hypothesis":"b"})";
  CHECK_THROWS_AS(parse_corpus_jsonl(dup), DataError);
  CHECK_THROWS_AS(parse_corpus_jsonl(R"({"id":"u1","hypothesis":"a"})"), DataError);
  CHECK_THROWS_AS(parse_corpus_jsonl(R"({"id":"u1","reference":"","hypothesis":"a"})"), DataError);
  CHECK_THROWS_AS(parse_corpus_jsonl("{not json"), DataError);

  // Empty hypothesis is the total-deletion case, not an error.
  CHECK(parse_corpus_jsonl(R"({"id":"u1","reference":"a","hypothesis":""})").size() == 1);
}

TEST_CASE("malformed line is reported with its number") {
  const std::string bad = R"({"id":"u1","reference":"a","hypothesis":"a"})"
                          "\n{oops\n";
  try {
    parse_corpus_jsonl(bad);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("severity parses case-insensitively") {
  CHECK(parse_severity("MILD") == Severity::kMild);
  CHECK(parse_severity("Moderate") == Severity::kModerate);
  CHECK(parse_severity("severe") == Severity::kSevere);
  CHECK(parse_severity("profound") == Severity::kUnknown);
  CHECK(parse_severity("") == Severity::kUnknown);
}

TEST_CASE("csv ingestion") {
  auto c = parse_corpus_csv(
      "id,speaker_id,severity,reference,hypothesis\n"
      "u1,s1,Mild,\"Okay, nine thirty five.\",Okay 9:30 five\n"
      "u2,s2,,\"say \"\"hi\"\"\",\n");
  REQUIRE(c.size() == 2);
  CHECK(c[0].severity == Severity::kMild);
  CHECK(c[0].reference == "Okay, nine thirty five.");
  CHECK(c[1].reference == "say \"hi\"");
  CHECK(c[1].hypothesis.empty());
  CHECK_THROWS_AS(parse_corpus_csv("id,reference\nu1,a\n"), DataError);
}

TEST_CASE("results round trip") {
  ScoredUtterance r;
  r.utterance = {"u1", "s1", Severity::kSevere, "Come right back please", "Come right back"};
  r.wer = 25.0;
  r.word_accuracy = 0.75;
  r.n_ref = 4;
  r.n_del = 1;
  r.precision = 0.9;
  r.recall = 0.8;
  r.f_bert = 2 * 0.9 * 0.8 / 1.7;
  r.error_types = {ErrorType::kDeletion};
  r.assessment = Assessment::kPreserved;

  const auto line = results_to_jsonl({r});
  CHECK(line.find("\"word_accuracy\":0.75") != std::string::npos);
  CHECK(line.find("\"wer\":25.0") != std::string::npos);

  const auto path = temp_path("one.jsonl");
  save_results({r}, path);
  auto back = load_results(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0] == r);

  save_results({}, path);
  CHECK(read_file(path).empty());
  CHECK(load_results(path).empty());
}

TEST_CASE("generated results round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScoredUtterance> rs;
  for (int i = 0; i < 200; ++i) {
    ScoredUtterance r;
    r.utterance.id = "u" + std::to_string(i);
    r.utterance.speaker_id = i % 3 ? "s" : "";
    r.utterance.severity = static_cast<Severity>(i % 4);
    r.utterance.reference = "ref \"" + std::to_string(u(rng)) + "\" ñ";
    r.utterance.hypothesis = i % 5 ? "hyp" : "";
    r.wer = 100.0 * u(rng);
    r.word_accuracy = 1.0 - r.wer / 100.0;
    r.n_ref = 1 + i;
    if (i % 2) {
      r.precision = u(rng);
      r.recall = u(rng);
      r.f_bert = u(rng);
    }
    for (ErrorType t : all_error_types()) {
      if (u(rng) < 0.3) r.error_types.insert(t);
    }
    if (i % 3 == 0) r.assessment = assessment_from_level(i % 3);
    rs.push_back(r);
  }
  const auto path = temp_path("many.jsonl");
  save_results(rs, path);
  CHECK(load_results(path) == rs);
}

TEST_CASE("validation") {
  ScoredUtterance r;
  r.utterance = {"u1", "", Severity::kUnknown, "a", "b"};
  r.wer = 25.0;
  r.word_accuracy = 0.7;
  CHECK_THROWS_AS(validate_result(r), DataError);
  r.word_accuracy = 0.75;
  CHECK_NOTHROW(validate_result(r));
  r.f_bert = 1.5;
  CHECK_THROWS_AS(validate_result(r), DataError);
  CHECK_THROWS_AS(assessment_from_level(3), DataError);
  CHECK(level(assessment_from_level(2)) == 2);
}
