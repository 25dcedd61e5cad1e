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

#include "asreval/report.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <exception>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "asreval/align.hpp"
#include "asreval/bert_model.hpp"
#include "asreval/error.hpp"
#include "asreval/stats.hpp"
#include "asreval/svg.hpp"

namespace asreval::report {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

BackendSpec BackendSpec::parse(const std::string& spec) {
  BackendSpec out;
  const auto colon = spec.find(':');
  if (colon == std::string::npos || colon + 1 == spec.size()) {
    throw UsageError("backend must be static:<table.tsv> or model:<path>[:layer], got '" + spec + "'");
  }
  const std::string kind = spec.substr(0, colon);
  std::string rest = spec.substr(colon + 1);
  if (kind == "static") {
    out.kind = Kind::kStatic;
    out.path = rest;
  } else if (kind == "model") {
    out.kind = Kind::kModel;
    // A trailing ":<digits>" selects the layer.
    const auto last = rest.rfind(':');
    if (last != std::string::npos && last + 1 < rest.size()) {
      const std::string tail = rest.substr(last + 1);
      int layer = 0;
      auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), layer);
      if (ec == std::errc() && p == tail.data() + tail.size()) {
        out.layer = layer;
        rest.resize(last);
      }
    }
    out.path = rest;
  } else {
    throw UsageError("unknown backend kind '" + kind + "'");
  }
  return out;
}

std::unique_ptr<EmbeddingBackend> BackendSpec::load() const {
  switch (kind) {
    case Kind::kStatic:
      return StaticLookupBackend::load(path, vocab);
    case Kind::kModel:
      return ModelRuntimeBackend::load(path, layer);
    case Kind::kNone:
      break;
  }
  throw UsageError("no embedding backend given");
}

bool parse_metrics(const std::string& list) {
  bool bert = false;
  bool any = false;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto end = list.find(',', start);
    if (end == std::string::npos) end = list.size();
    const std::string name = list.substr(start, end - start);
    if (name == "bertscore") {
      bert = true;
    } else if (name != "wer") {
      throw UsageError("unknown metric '" + name + "' (expected wer, bertscore)");
    }
    any = true;
    start = end + 1;
  }
  if (!any) throw UsageError("no metrics given");
  return bert;
}

namespace {

ScoredUtterance score_one(const Utterance& u, const ClassifierResources& resources,
                          const EmbeddingBackend* backend, const IdfTable* idf) {
  ScoredUtterance s;
  s.utterance = u;
  const auto ref = normalize_for_wer(u.reference);
  if (ref.tokens.empty()) {
    throw DataError("utterance '" + u.id + "': reference has no words after normalization");
  }
  const auto alignment = align(ref, normalize_for_wer(u.hypothesis));
  const auto wer = compute_wer(alignment);
  s.wer = wer.wer;
  s.word_accuracy = wer.word_accuracy;
  s.n_ref = alignment.n_ref;
  s.n_sub = alignment.n_sub;
  s.n_ins = alignment.n_ins;
  s.n_del = alignment.n_del;
  s.error_types = classify(u.reference, u.hypothesis, alignment, resources);
  if (backend != nullptr) {
    const auto b = score(u.reference, u.hypothesis, *backend, *idf);
    s.precision = b.precision;
    s.recall = b.recall;
    s.f_bert = b.f_bert;
  }
  validate_result(s);
  return s;
}

double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

ordered_json metric_means(const std::vector<const ScoredUtterance*>& rows, bool bertscore) {
  std::vector<double> wer, wa, p, r, f;
  for (const auto* s : rows) {
    wer.push_back(s->wer);
    wa.push_back(s->word_accuracy);
    if (bertscore) {
      p.push_back(s->precision.value_or(0.0));
      r.push_back(s->recall.value_or(0.0));
      f.push_back(s->f_bert.value_or(0.0));
    }
  }
  ordered_json j;
  j["n"] = rows.size();
  j["wer"] = mean(wer);
  j["word_accuracy"] = mean(wa);
  if (bertscore) {
    j["precision"] = mean(p);
    j["recall"] = mean(r);
    j["f_bert"] = mean(f);
  }
  return j;
}

}  // namespace

std::vector<ScoredUtterance> score_corpus(const std::vector<Utterance>& corpus,
                                          const ClassifierResources& resources,
                                          const EmbeddingBackend* backend, const IdfTable* idf, int jobs) {
  if (backend != nullptr && idf == nullptr) throw UsageError("BERTScore needs an idf table");
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
  std::vector<ScoredUtterance> out(corpus.size());
  std::vector<std::exception_ptr> errors(corpus.size());
  const int threads = jobs > 0 ? jobs : kernels::max_threads();

#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = score_one(corpus[i], resources, backend, idf);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  // Report the first failure in corpus order so the message does not depend
  // on scheduling.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

ordered_json summarize_scores(const std::vector<ScoredUtterance>& results, bool bertscore) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["metrics"] = bertscore ? ordered_json::array({"wer", "bertscore"}) : ordered_json::array({"wer"});

  std::vector<const ScoredUtterance*> all;
  for (const auto& s : results) all.push_back(&s);
  j["overall"] = metric_means(all, bertscore);

  ordered_json by_severity = ordered_json::object();
  for (Severity sev : {Severity::kMild, Severity::kModerate, Severity::kSevere, Severity::kUnknown}) {
    std::vector<const ScoredUtterance*> rows;
    for (const auto& s : results) {
      if (s.utterance.severity == sev) rows.push_back(&s);
    }
    if (!rows.empty()) by_severity[std::string(to_string(sev))] = metric_means(rows, bertscore);
  }
  j["by_severity"] = by_severity;

  ordered_json counts = ordered_json::object();
  for (ErrorType t : all_error_types()) {
    std::size_t c = 0;
    for (const auto& s : results) c += s.error_types.count(t);
    counts[std::string(to_string(t))] = c;
  }
  j["error_type_counts"] = counts;
  return j;
}

ordered_json cmd_score(const ScoreConfig& config) {
  const fs::path scored_path = config.out_dir / "scored.jsonl";
  const fs::path summary_path = config.out_dir / "summary.json";
  try {
    const auto corpus = load_corpus(config.input, config.format);
    const auto resources = config.resources_dir.empty() ? ClassifierResources::defaults()
                                                        : ClassifierResources::load_dir(config.resources_dir);
    std::unique_ptr<EmbeddingBackend> backend;
    IdfTable idf;
    if (config.bertscore) {
      backend = config.backend.load();
      if (config.idf_source == "refs") {
        std::vector<std::string> refs;
        refs.reserve(corpus.size());
        for (const auto& u : corpus) refs.push_back(u.reference);
        idf = build_idf(refs, backend->vocabulary());
      } else {
        idf = IdfTable::load(config.idf_source);
      }
    }
    const auto results = score_corpus(corpus, resources, backend.get(), &idf, config.jobs);
    auto summary = summarize_scores(results, config.bertscore);
    fs::create_directories(config.out_dir);
    save_results(results, scored_path);
    write_file(summary_path, summary.dump(2) + "\n");
    return summary;
  } catch (...) {
    std::error_code ec;
    fs::remove(scored_path, ec);
    fs::remove(summary_path, ec);
    throw;
  }
}

namespace {

bool earlier(const annotation::AnnotationRecord* a, const annotation::AnnotationRecord* b) {
  if (a->completed_at != b->completed_at) return a->completed_at < b->completed_at;
  return a->task_id < b->task_id;
}

// Completed records per utterance, earliest first.
std::map<std::string, std::vector<const annotation::AnnotationRecord*>> by_utterance(
    const std::vector<annotation::AnnotationRecord>& records) {
  std::map<std::string, std::vector<const annotation::AnnotationRecord*>> out;
  for (const auto& r : records) out[r.utterance_id].push_back(&r);
  for (auto& [id, list] : out) std::sort(list.begin(), list.end(), earlier);
  return out;
}

std::string type_label(const ErrorTypeSet& types) {
  if (types.empty()) return "none";
  std::string out;
  for (ErrorType t : types) {
    if (!out.empty()) out += '+';
    out += to_string(t);
  }
  return out;
}

ordered_json kappa_json(const stats::KappaResult& k) {
  ordered_json j;
  j["kappa"] = k.kappa;
  j["observed_agreement"] = k.observed_po;
  j["expected_agreement"] = k.expected_pe;
  j["n_pairs"] = k.n;
  return j;
}

ordered_json olr_json(const std::string& name, const std::vector<std::string>& predictors,
                      const stats::OlrModel& m) {
  ordered_json j;
  j["model"] = name;
  j["n_obs"] = m.n_obs;
  j["n_params"] = m.n_params();
  j["log_likelihood"] = m.log_likelihood;
  j["aic"] = m.aic;
  ordered_json coefs = ordered_json::array();
  for (Eigen::Index i = 0; i < m.beta.size(); ++i) {
    coefs.push_back({{"predictor", predictors[static_cast<std::size_t>(i)]},
                     {"beta", m.beta[i]},
                     {"std_error", m.std_errors[i]},
                     {"t", m.t_stats[i]},
                     {"p_value", m.p_values[i]}});
  }
  j["coefficients"] = coefs;
  j["thresholds"] = std::vector<double>(m.thresholds.data(), m.thresholds.data() + m.thresholds.size());
  j["levels"] = m.levels;
  j["iterations"] = m.iterations;
  return j;
}

ordered_json summary_json(const stats::BoxplotSummary& b) {
  ordered_json j;
  j["group"] = b.group;
  j["n"] = b.n;
  j["median"] = b.median;
  j["q1"] = b.q1;
  j["q3"] = b.q3;
  j["whisker_low"] = b.whisker_low;
  j["whisker_high"] = b.whisker_high;
  j["mean"] = b.mean;
  j["sd"] = b.sd;
  j["outliers"] = b.outliers;
  return j;
}

}  // namespace

std::vector<ScoredUtterance> merge_annotations(std::vector<ScoredUtterance> scored,
                                               const std::vector<annotation::AnnotationRecord>& records) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < scored.size(); ++i) index.emplace(scored[i].utterance.id, i);
  for (const auto& [id, list] : by_utterance(records)) {
    auto it = index.find(id);
    if (it == index.end()) throw DataError("annotation refers to unknown utterance '" + id + "'");
    auto& s = scored[it->second];
    s.assessment = list.front()->assessment;
    if (!list.front()->error_types.empty()) s.error_types = list.front()->error_types;
  }
  return scored;
}

ordered_json analyze(const std::vector<ScoredUtterance>& scored_in,
                     const std::vector<annotation::AnnotationRecord>& records, const fs::path& svg_dir) {
  const auto scored = merge_annotations(scored_in, records);
  const bool have_bert =
      std::any_of(scored.begin(), scored.end(), [](const ScoredUtterance& s) { return s.f_bert.has_value(); });

  std::vector<const ScoredUtterance*> annotated;
  for (const auto& s : scored) {
    if (s.assessment && (!have_bert || s.f_bert)) annotated.push_back(&s);
  }

  if (annotated.empty()) throw DataError("no scored utterance carries an assessment");
  {
    std::set<Assessment> levels;
    for (const auto* s : annotated) levels.insert(*s->assessment);
    if (levels.size() < 2) throw DataError("annotations use fewer than two assessment levels");
  }

  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["n_utterances"] = scored.size();
  j["n_annotated"] = annotated.size();
  j["n_annotation_records"] = records.size();

  std::vector<stats::Metric> metrics{stats::Metric::kWordAccuracy};
  if (have_bert) metrics.push_back(stats::Metric::kFBert);
  const std::vector<stats::GroupBy> groupings{stats::GroupBy::kAssessment, stats::GroupBy::kErrorType};

  // One-way ANOVA of each metric across assessment levels and error types.
  ordered_json anova = ordered_json::array();
  for (auto m : metrics) {
    for (auto g : groupings) {
      ordered_json a;
      a["metric"] = stats::to_string(m);
      a["group_by"] = stats::to_string(g);
      try {
        std::vector<std::vector<double>> groups;
        for (auto& [name, values] : stats::group_values(scored, g, m)) groups.push_back(std::move(values));
        const auto r = stats::anova_oneway(groups);
        a["f"] = r.f_stat;
        a["df_between"] = r.df_between;
        a["df_within"] = r.df_within;
        a["p_value"] = r.p_value;
      } catch (const DataError& e) {
        a["skipped"] = e.what();
      }
      anova.push_back(a);
    }
  }
  j["anova"] = anova;

  // Ordinal models of the assessment on each metric and on both.
  struct Spec {
    std::string name;
    std::vector<std::string> predictors;
  };
  std::vector<Spec> specs{{"word_accuracy", {"word_accuracy"}}};
  if (have_bert) {
    specs.push_back({"f_bert", {"f_bert"}});
    specs.push_back({"word_accuracy+f_bert", {"word_accuracy", "f_bert"}});
  }
  std::vector<Assessment> y;
  for (const auto* s : annotated) y.push_back(*s->assessment);
  ordered_json olr = ordered_json::array();
  std::vector<stats::OlrModel> fitted;
  std::vector<std::string> fitted_names;
  for (const auto& spec : specs) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(annotated.size()), static_cast<Eigen::Index>(spec.predictors.size()));
    for (std::size_t r = 0; r < annotated.size(); ++r) {
      for (std::size_t c = 0; c < spec.predictors.size(); ++c) {
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            spec.predictors[c] == "f_bert" ? *annotated[r]->f_bert : annotated[r]->word_accuracy;
      }
    }
    auto model = stats::fit_olr(std::span<const Assessment>(y), x);
    olr.push_back(olr_json(spec.name, spec.predictors, model));
    fitted.push_back(std::move(model));
    fitted_names.push_back(spec.name);
  }
  j["ordinal_regression"] = olr;
  ordered_json ranking = ordered_json::array();
  for (std::size_t i : stats::compare_aic(fitted)) {
    ranking.push_back({{"model", fitted_names[i]}, {"aic", fitted[i].aic}});
  }
  j["aic_ranking"] = ranking;

  // Agreement on utterances annotated more than once: first two records.
  std::vector<std::string> la, lb, ta, tb;
  for (const auto& [id, list] : by_utterance(records)) {
    if (list.size() < 2) continue;
    la.push_back(std::to_string(level(list[0]->assessment)));
    lb.push_back(std::to_string(level(list[1]->assessment)));
    ta.push_back(type_label(list[0]->error_types));
    tb.push_back(type_label(list[1]->error_types));
  }
  ordered_json agreement;
  agreement["n_pairs"] = la.size();
  if (la.empty()) {
    agreement["assessment"] = nullptr;
    agreement["error_types"] = nullptr;
  } else {
    agreement["assessment"] = kappa_json(stats::cohens_kappa(la, lb));
    agreement["error_types"] = kappa_json(stats::cohens_kappa(ta, tb));
  }
  j["agreement"] = agreement;

  ordered_json boxplots = ordered_json::array();
  for (auto g : groupings) {
    for (auto m : metrics) {
      ordered_json b;
      b["metric"] = stats::to_string(m);
      b["group_by"] = stats::to_string(g);
      try {
        const auto summaries = stats::boxplot_by(scored, g, m);
        ordered_json groups = ordered_json::array();
        for (const auto& s : summaries) groups.push_back(summary_json(s));
        b["groups"] = groups;
        if (!svg_dir.empty()) {
          const std::string file = "boxplot_" + stats::to_string(m) + "_by_" + stats::to_string(g) + ".svg";
          write_file(svg_dir / file,
                     svg::boxplot(summaries, stats::to_string(m) + " by " + stats::to_string(g),
                                  stats::to_string(m)));
          b["svg"] = file;
        }
      } catch (const DataError& e) {
        b["skipped"] = e.what();
      }
      boxplots.push_back(b);
    }
  }
  j["boxplots"] = boxplots;
  return j;
}

ordered_json cmd_analyze(const fs::path& scored_path, const fs::path& annotations_path, const fs::path& out_dir) {
  const auto scored = load_results(scored_path);
  const auto records = annotation::load_annotations(annotations_path);
  fs::create_directories(out_dir);
  auto j = analyze(scored, records, out_dir);
  write_file(out_dir / "analysis.json", j.dump(2) + "\n");
  return j;
}

}  // namespace asreval::report
