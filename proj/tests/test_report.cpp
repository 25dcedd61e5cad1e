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

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "asreval/error.hpp"
#include "asreval/report.hpp"
#include "asreval/svg.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace asreval;
using namespace asreval::report;
namespace fs = std::filesystem;
using nlohmann::json;
using synthetic::synthetic_corpus;
using synthetic::write_corpus;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / "asreval_test_report" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ScoreConfig static_config(const fs::path& input, const fs::path& out) {
  ScoreConfig c;
  c.input = input;
  c.backend = BackendSpec::parse("static:" ASREVAL_FIXTURES "/static_tiny.tsv");
  c.out_dir = out;
  return c;
}

// Scored results whose assessments follow a proportional-odds model on
// word accuracy; f_bert is independent noise.
std::pair<std::vector<ScoredUtterance>, std::vector<annotation::AnnotationRecord>> annotated_data(
    std::size_t n, std::uint64_t seed, std::size_t doubles) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = u(rng);
  Eigen::VectorXd beta(1);
  beta << -8.0;
  const auto y = oracle::sample_olr(rng, x, beta, {-5.0, -3.0});
  std::vector<ScoredUtterance> scored(n);
  std::vector<annotation::AnnotationRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = scored[i];
    s.utterance = {"u" + std::to_string(i), "s", Severity::kModerate, "ref", "hyp"};
    s.word_accuracy = x(static_cast<Eigen::Index>(i), 0);
    s.wer = 100.0 * (1.0 - s.word_accuracy);
    s.n_ref = 10;
    s.f_bert = u(rng);
    s.precision = s.recall = s.f_bert;
    s.error_types = {i % 3 == 0 ? ErrorType::kWordError : ErrorType::kNormalization};
    annotation::AnnotationRecord r;
    r.task_id = "t" + std::to_string(i);
    r.utterance_id = s.utterance.id;
    r.annotator_id = "alice";
    r.assessment = assessment_from_level(y[i]);
    r.completed_at = static_cast<std::int64_t>(i + 1);
    records.push_back(r);
    if (i < doubles) {
      r.task_id = "d" + std::to_string(i);
      r.annotator_id = "bob";
      r.completed_at += 100000;
      if (i % 4 == 0) r.assessment = assessment_from_level((y[i] + 1) % 3);
      records.push_back(r);
    }
  }
  return {scored, records};
}

std::size_t count_boxes(const boost::property_tree::ptree& node) {
  std::size_t n = 0;
  for (const auto& [name, child] : node) {
    if (name == "g" && child.get<std::string>("<xmlattr>.class", "") == "box") ++n;
    if (name != "<xmlattr>") n += count_boxes(child);
  }
  return n;
}

}  // namespace

TEST_CASE("backend spec") {
  auto b = BackendSpec::parse("static:emb.tsv");
  CHECK(b.kind == BackendSpec::Kind::kStatic);
  CHECK(b.path == "emb.tsv");
  b = BackendSpec::parse("model:/m/bert:7");
  CHECK(b.kind == BackendSpec::Kind::kModel);
  CHECK(b.path == "/m/bert");
  CHECK(b.layer == 7);
  b = BackendSpec::parse("model:/m/bert");
  CHECK(b.layer == 9);
  CHECK_THROWS_AS(BackendSpec::parse("onnx:x"), UsageError);
  CHECK_THROWS_AS(BackendSpec::parse("static:"), UsageError);
  CHECK_THROWS_AS(BackendSpec{}.load(), UsageError);

  CHECK(parse_metrics("wer,bertscore"));
  CHECK_FALSE(parse_metrics("wer"));
  CHECK_THROWS_AS(parse_metrics("wer,bleu"), UsageError);
  CHECK_THROWS_AS(parse_metrics(""), UsageError);
}

TEST_CASE("score the golden corpus") {
  const auto out = scratch("golden");
  const auto summary = cmd_score(static_config(ASREVAL_FIXTURES "/golden.jsonl", out));
  CHECK(summary["schema_version"] == 1);
  CHECK(summary["overall"]["n"] == 8);
  const auto results = load_results(out / "scored.jsonl");
  REQUIRE(results.size() == 8);
  const double want[] = {0.75, 0.75, 0.60, 0.50, 0.50, 0.86, 0.88, 0.75};
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(std::round(results[i].word_accuracy * 100.0) / 100.0 == doctest::Approx(want[i]).epsilon(1e-12));
  }
  CHECK(*results[3].f_bert == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(summary["error_type_counts"]["proper_noun"] == 2);
}

TEST_CASE("identical corpus scores perfectly") {
  const auto dir = scratch("same");
  auto corpus = synthetic_corpus(50, 1);
  for (auto& u : corpus) u.hypothesis = u.reference;
  write_corpus(dir / "in.jsonl", corpus);
  const auto s = cmd_score(static_config(dir / "in.jsonl", dir / "out"));
  CHECK(s["overall"]["wer"] == 0.0);
  CHECK(s["overall"]["f_bert"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& [k, v] : s["error_type_counts"].items()) CHECK(v == 0);
}

TEST_CASE("summary rows per severity") {
  const auto dir = scratch("sev");
  auto corpus = synthetic_corpus(30, 2);
  for (std::size_t i = 0; i < corpus.size(); ++i) corpus[i].severity = static_cast<Severity>(i % 3);
  write_corpus(dir / "in.jsonl", corpus);
  auto c = static_config(dir / "in.jsonl", dir / "out");
  c.bertscore = false;
  const auto s = cmd_score(c);
  CHECK(s["by_severity"].size() == 3);
  CHECK(s["by_severity"].contains("mild"));
  CHECK(s["by_severity"].contains("moderate"));
  CHECK(s["by_severity"].contains("severe"));
  CHECK_FALSE(s["overall"].contains("f_bert"));
  CHECK(s["by_severity"]["mild"]["n"] == 10);
  const auto r = load_results(dir / "out" / "scored.jsonl");
  CHECK_FALSE(r[0].f_bert.has_value());
}

TEST_CASE("score output is deterministic across runs and thread counts") {
  const auto dir = scratch("det");
  write_corpus(dir / "in.jsonl", synthetic_corpus(300, 3));
  std::string first;
  for (int jobs : {1, 4, 4, 2}) {
    auto c = static_config(dir / "in.jsonl", dir / ("out" + std::to_string(jobs)));
    c.jobs = jobs;
    cmd_score(c);
    const auto bytes = read_file(c.out_dir / "scored.jsonl") + read_file(c.out_dir / "summary.json");
    if (first.empty()) first = bytes;
    CHECK(bytes == first);
  }
}

TEST_CASE("failed scoring leaves no partial output") {
  const auto dir = scratch("fail");
  auto corpus = synthetic_corpus(20, 4);
  corpus[13].reference = "?!";  // no words once punctuation is stripped
  write_corpus(dir / "in.jsonl", corpus);
  fs::create_directories(dir / "out");
  write_file(dir / "out" / "scored.jsonl", "stale\n");
  CHECK_THROWS_AS(cmd_score(static_config(dir / "in.jsonl", dir / "out")), DataError);
  CHECK_FALSE(fs::exists(dir / "out" / "scored.jsonl"));
  CHECK_FALSE(fs::exists(dir / "out" / "summary.json"));
}

TEST_CASE("analysis of an annotated corpus") {
  const auto [scored, records] = annotated_data(600, 5, 0);
  const auto dir = scratch("analyze");
  const auto j = analyze(scored, records, dir);

  CHECK(j["n_annotated"] == 600);
  REQUIRE(j["ordinal_regression"].size() == 3);
  CHECK(j["ordinal_regression"][0]["model"] == "word_accuracy");
  CHECK(j["ordinal_regression"][0]["coefficients"][0]["beta"].get<double>() < 0.0);
  CHECK(j["aic_ranking"][0]["model"] != "f_bert");
  CHECK(j["aic_ranking"][2]["model"] == "f_bert");
  CHECK(j["agreement"]["n_pairs"] == 0);
  CHECK(j["agreement"]["assessment"].is_null());

  REQUIRE(j["anova"].size() == 4);
  CHECK(j["anova"][0]["metric"] == "word_accuracy");
  CHECK(j["anova"][0]["group_by"] == "assessment");
  CHECK(j["anova"][0]["p_value"].get<double>() < 1e-6);

  REQUIRE(j["boxplots"].size() == 4);
  for (const auto& b : j["boxplots"]) {
    const auto path = dir / b["svg"].get<std::string>();
    REQUIRE(fs::exists(path));
    boost::property_tree::ptree tree;
    std::istringstream in(read_file(path));
    CHECK_NOTHROW(boost::property_tree::read_xml(in, tree));
    CHECK(count_boxes(tree) == b["groups"].size());
  }
  CHECK(j["boxplots"][2]["group_by"] == "error_type");
  CHECK(j["boxplots"][2]["groups"].size() == 2);
}

TEST_CASE("kappa over double annotations") {
  const auto [scored, records] = annotated_data(400, 6, 40);
  const auto j = analyze(scored, records);
  CHECK(j["agreement"]["n_pairs"] == 40);
  const double k = j["agreement"]["assessment"]["kappa"];
  CHECK(k < 1.0);
  CHECK(k > 0.3);
  CHECK(j["agreement"]["error_types"]["kappa"].get<double>() == doctest::Approx(1.0));

  // The earliest record is the one merged into the scored data.
  const auto merged = merge_annotations(scored, records);
  for (std::size_t i = 0; i < 40; ++i) CHECK(merged[i].assessment == records[2 * i].assessment);
}

TEST_CASE("analysis input errors") {
  auto [scored, records] = annotated_data(50, 7, 0);
  CHECK_THROWS_AS(analyze(scored, {}), DataError);
  auto one_level = records;
  for (auto& r : one_level) r.assessment = Assessment::kPreserved;
  CHECK_THROWS_AS(analyze(scored, one_level), DataError);
  auto unknown = records;
  unknown[0].utterance_id = "nobody";
  CHECK_THROWS_AS(analyze(scored, unknown), DataError);

  // Complete separation has no maximum likelihood estimate.
  auto separated = records;
  for (std::size_t i = 0; i < separated.size(); ++i) {
    const double wa = scored[i].word_accuracy;
    separated[i].assessment = assessment_from_level(wa > 0.66 ? 0 : wa > 0.33 ? 1 : 2);
  }
  CHECK_THROWS_AS(analyze(scored, separated), NumericalError);
}

TEST_CASE("svg boxplot") {
  const std::vector<stats::BoxplotSummary> groups{stats::summarize("a<b", {1, 2, 3, 4, 100}),
                                                  stats::summarize("c", {0.5})};
  const auto svg1 = svg::boxplot(groups, "Word & accuracy", "wa");
  CHECK(svg1 == svg::boxplot(groups, "Word & accuracy", "wa"));
  CHECK(svg1.find("a&lt;b") != std::string::npos);
  boost::property_tree::ptree tree;
  std::istringstream in(svg1);
  boost::property_tree::read_xml(in, tree);
  CHECK(count_boxes(tree) == 2);
  CHECK(svg::escape_xml("<&>\"'") == "&lt;&amp;&gt;&quot;&apos;");
}

TEST_CASE("cli exit codes") {
  const auto dir = scratch("cli");
  const std::string exe = ASREVAL_CLI;
  auto run = [&](const std::string& args) {
    const int rc = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  write_corpus(dir / "ok.jsonl", synthetic_corpus(10, 8));
  CHECK(run("score --refs-hyps " + (dir / "ok.jsonl").string() + " --metrics wer --out " +
            (dir / "o").string()) == 0);
  CHECK(run("score --refs-hyps " + (dir / "ok.jsonl").string() + " --metrics wer,bleu --out " +
            (dir / "o").string()) == 1);
  CHECK(run("score --refs-hyps " + (dir / "ok.jsonl").string() + " --out " + (dir / "o").string()) == 1);
  CHECK(run("frobnicate") == 1);
  write_file(dir / "bad.jsonl", "{nope\n");
  CHECK(run("score --refs-hyps " + (dir / "bad.jsonl").string() + " --metrics wer --out " +
            (dir / "o2").string()) == 2);

  auto [scored, records] = annotated_data(60, 9, 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double wa = scored[i].word_accuracy;
    records[i].assessment = assessment_from_level(wa > 0.5 ? 0 : 2);
  }
  save_results(scored, dir / "scored.jsonl");
  std::string ann;
  for (const auto& r : records) ann += annotation::to_json(r).dump() + "\n";
  write_file(dir / "ann.jsonl", ann);
  CHECK(run("analyze --scored " + (dir / "scored.jsonl").string() + " --annotations " +
            (dir / "ann.jsonl").string() + " --out " + (dir / "a").string()) == 3);
}
