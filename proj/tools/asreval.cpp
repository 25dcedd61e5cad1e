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

#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "asreval/annotation.hpp"
#include "asreval/annotation_http.hpp"
#include "asreval/corpus.hpp"
#include "asreval/error.hpp"
#include "asreval/report.hpp"

namespace {

using namespace asreval;

void configure_logging() {
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("ASREVAL_LOG");
  if (env == nullptr) {
    spdlog::set_level(spdlog::level::warn);
    return;
  }
  const auto level = spdlog::level::from_str(env);
  // from_str maps unknown names to "off"; only honour that when asked.
  if (level == spdlog::level::off && std::string(env) != "off") {
    spdlog::set_level(spdlog::level::warn);
    spdlog::warn("ignoring unknown ASREVAL_LOG level '{}'", env);
    return;
  }
  spdlog::set_level(level);
}

int run(int argc, char** argv) {
  CLI::App app{"ASR evaluation: WER, BERTScore, error types, statistics and an annotation service"};
  app.require_subcommand(1);

  report::ScoreConfig score;
  std::string metrics = "wer,bertscore";
  std::string format = "jsonl";
  std::string backend;
  std::string vocab;
  auto* score_cmd = app.add_subcommand("score", "Score a corpus of reference/hypothesis pairs");
  score_cmd->add_option("--refs-hyps", score.input, "Corpus file (JSONL or CSV)")->required();
  score_cmd->add_option("--format", format, "jsonl or csv")->capture_default_str();
  score_cmd->add_option("--metrics", metrics, "Comma list of wer, bertscore")->capture_default_str();
  score_cmd->add_option("--backend", backend, "static:<table.tsv> or model:<dir>[:layer]");
  score_cmd->add_option("--vocab", vocab, "WordPiece vocabulary for the static backend");
  score_cmd->add_option("--idf", score.idf_source, "'refs' or an idf table file")->capture_default_str();
  score_cmd->add_option("--resources", score.resources_dir, "Directory overriding classifier lexicons");
  score_cmd->add_option("--jobs,-j", score.jobs, "Worker threads (0 = all)")->capture_default_str();
  score_cmd->add_option("--out,-o", score.out_dir, "Output directory")->required();

  std::string scored_path, annotations_path, analysis_out;
  auto* analyze_cmd = app.add_subcommand("analyze", "Statistics over scored results and annotations");
  analyze_cmd->add_option("--scored", scored_path, "scored.jsonl from 'score'")->required();
  analyze_cmd->add_option("--annotations", annotations_path, "Exported annotation JSONL")->required();
  analyze_cmd->add_option("--out,-o", analysis_out, "Output directory")->required();

  std::string corpus_path, tokens_path, log_path, host = "127.0.0.1", ui_dir;
  std::string serve_format = "jsonl";
  int port = 8080;
  annotation::StoreOptions store_options;
  auto* serve_cmd = app.add_subcommand("serve", "Run the annotation service");
  serve_cmd->add_option("--corpus", corpus_path, "Corpus to annotate")->required();
  serve_cmd->add_option("--format", serve_format, "jsonl or csv")->capture_default_str();
  serve_cmd->add_option("--annotators", tokens_path, "File of 'annotator_id<TAB>token' lines")->required();
  serve_cmd->add_option("--log", log_path, "Event log (created or replayed)")->required();
  serve_cmd->add_option("--overlap", store_options.overlap_ratio, "Share annotated twice")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  serve_cmd->add_option("--seed", store_options.seed, "Overlap selection seed")->capture_default_str();
  serve_cmd->add_option("--host", host)->capture_default_str();
  serve_cmd->add_option("--port", port)->capture_default_str();
  serve_cmd->add_option("--ui", ui_dir, "Static files for the annotation UI");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (score_cmd->parsed()) {
    score.format = parse_corpus_format(format);
    score.bertscore = report::parse_metrics(metrics);
    if (score.bertscore) {
      if (backend.empty()) throw UsageError("--backend is required for bertscore");
      score.backend = report::BackendSpec::parse(backend);
      score.backend.vocab = vocab;
    }
    const auto start = std::chrono::steady_clock::now();
    const auto summary = report::cmd_score(score);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    spdlog::info("scored {} utterances in {} ms", summary["overall"]["n"].get<std::size_t>(), ms.count());
    std::cout << summary.dump(2) << "\n";
  } else if (analyze_cmd->parsed()) {
    const auto j = report::cmd_analyze(scored_path, annotations_path, analysis_out);
    spdlog::info("wrote {}/analysis.json", analysis_out);
    std::cout << j["aic_ranking"].dump(2) << "\n";
  } else if (serve_cmd->parsed()) {
    store_options.tokens = annotation::load_annotator_tokens(tokens_path);
    annotation::AnnotationStore store(load_corpus(corpus_path, parse_corpus_format(serve_format)), log_path,
                                      store_options);
    spdlog::info("serving {} tasks on {}:{}", store.tasks().size(), host, port);
    annotation::serve(store, host, port, ui_dir);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  try {
    return run(argc, argv);
  } catch (const asreval::UsageError& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const asreval::DataError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const asreval::NumericalError& e) {
    spdlog::error("{}", e.what());
    return 3;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
}
