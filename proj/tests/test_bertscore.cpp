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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "asreval/bertscore.hpp"
#include "asreval/error.hpp"
#include "asreval/text.hpp"
#include "doctest.h"

using namespace asreval;

namespace {

StaticLookupBackend axis_backend() {
  std::unordered_map<std::string, std::vector<double>> t{{"a", {1, 0}}, {"b", {0, 1}}};
  return StaticLookupBackend(t, 2, Vocabulary::from_tokens({"a", "b"}));
}

StaticLookupBackend random_backend(std::size_t n_words, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::unordered_map<std::string, std::vector<double>> t;
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n_words; ++i) {
    std::string w = "w" + std::to_string(i);
    std::vector<double> v(dim);
    for (auto& x : v) x = g(rng);
    t.emplace(w, v);
    words.push_back(w);
  }
  return StaticLookupBackend(t, dim, Vocabulary::from_tokens(words));
}

std::string random_text(std::mt19937_64& rng, std::size_t n_words, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, max_len), w(0, n_words - 1);
  std::string s;
  for (std::size_t i = len(rng); i > 0; --i) s += "w" + std::to_string(w(rng)) + " ";
  return s;
}

// Eq. by definition: every pair visited, no kernels.
BertScoreResult brute(const std::string& ref, const std::string& hyp, const EmbeddingBackend& be,
                      const IdfTable& idf) {
  const auto x = tokenize(ref, be.vocabulary()), y = tokenize(hyp, be.vocabulary());
  const auto ex = embed(x, be), ey = embed(y, be);
  auto side = [&](const TokenSeq& s, const EmbeddingMatrix& es, const TokenSeq& o, const EmbeddingMatrix& eo) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.is_special[i]) continue;
      double best = -2.0;
      for (std::size_t j = 0; j < o.size(); ++j) {
        if (o.is_special[j]) continue;
        double dot = 0.0;
        for (std::size_t d = 0; d < es.dim(); ++d) dot += es.row(i)[d] * eo.row(j)[d];
        best = std::max(best, dot);
      }
      num += idf.weight(s.tokens[i]) * best;
      den += idf.weight(s.tokens[i]);
    }
    return num / den;
  };
  BertScoreResult r;
  r.recall = side(x, ex, y, ey);
  r.precision = side(y, ey, x, ex);
  r.f_bert = f_measure(r.precision, r.recall);
  return r;
}

}  // namespace

TEST_CASE("idf weights") {
  const auto vocab = Vocabulary::from_tokens({"a", "b", "c"});
  const auto idf = build_idf({"a b", "a"}, vocab);
  CHECK(idf.doc_count() == 2);
  CHECK(idf.weight("a") == doctest::Approx(0.0));
  CHECK(idf.weight("b") == doctest::Approx(std::log(1.5)));
  CHECK(idf.weight("c") == doctest::Approx(std::log(3.0)));
  CHECK(idf.weight("[CLS]") == 0.0);
  CHECK(idf.weight("[SEP]") == 0.0);
  CHECK(build_idf({"a"}, vocab).weight("a") == 0.0);
  CHECK_THROWS_AS(build_idf({}, vocab), DataError);

  const auto path = std::filesystem::temp_directory_path() / "asreval_idf.tsv";
  idf.save(path);
  const auto back = IdfTable::load(path);
  CHECK(back.doc_count() == 2);
  CHECK(back.weight("b") == idf.weight("b"));
  CHECK(back.weight("c") == idf.weight("c"));
}

TEST_CASE("hand example") {
  const auto be = axis_backend();
  const IdfTable uniform({{"a", 1.0}, {"b", 1.0}}, 2);
  auto r = score("a b", "a", be, uniform);
  CHECK(r.recall == doctest::Approx(0.5));
  CHECK(r.precision == doctest::Approx(1.0));
  CHECK(r.f_bert == doctest::Approx(2.0 / 3.0));

  r = score("a", "b", be, uniform);
  CHECK(r.precision == doctest::Approx(0.0));
  CHECK(r.recall == doctest::Approx(0.0));
  CHECK(r.f_bert == 0.0);

  // All weights zero: uniform fallback gives the same numbers.
  const IdfTable zero({{"a", 0.0}, {"b", 0.0}}, 5);
  r = score("a b", "a", be, zero);
  CHECK(r.recall == doctest::Approx(0.5));
  CHECK(r.precision == doctest::Approx(1.0));
}

TEST_CASE("empty sides") {
  const auto be = axis_backend();
  const IdfTable idf({{"a", 1.0}, {"b", 1.0}}, 2);
  const auto r = score("a", "", be, idf);
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  CHECK(r.f_bert == 0.0);
  CHECK_THROWS_AS(score("", "", be, idf), DataError);
  // Punctuation still yields (unknown) tokens, so only the hypothesis is empty.
  CHECK(score("...", "", be, idf).f_bert == 0.0);
}

TEST_CASE("accent-only difference scores one") {
  auto be = StaticLookupBackend::load(ASREVAL_FIXTURES "/static_tiny.tsv");
  const auto idf = build_idf({"play Beyonce"}, be->vocabulary());
  const auto r = score("play Beyonce", "play Beyoncé", *be, idf);
  CHECK(r.precision == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.recall == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.f_bert == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("properties on random static embeddings") {
  const auto be = random_backend(12, 6, 9);
  std::mt19937_64 rng(10);
  std::vector<std::string> refs;
  for (int i = 0; i < 30; ++i) refs.push_back(random_text(rng, 12, 5));
  const auto idf = build_idf(refs, be.vocabulary());

  for (int t = 0; t < 300; ++t) {
    const auto x = random_text(rng, 12, 5);
    const auto y = random_text(rng, 12, 5);
    const auto r = score(x, y, be, idf);

    const auto self = score(x, x, be, idf);
    CHECK(self.precision == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(self.recall == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(self.f_bert == doctest::Approx(1.0).epsilon(1e-12));

    const auto o = brute(x, y, be, idf);
    CHECK(r.precision == doctest::Approx(o.precision).epsilon(1e-12));
    CHECK(r.recall == doctest::Approx(o.recall).epsilon(1e-12));

    const auto swapped = score(y, x, be, idf);
    CHECK(swapped.precision == doctest::Approx(r.recall).epsilon(1e-12));
    CHECK(swapped.recall == doctest::Approx(r.precision).epsilon(1e-12));
    CHECK(swapped.f_bert == doctest::Approx(r.f_bert).epsilon(1e-12));

    // Reversing word order permutes the token set.
    auto words = text::split_whitespace(y);
    std::reverse(words.begin(), words.end());
    std::string rev;
    for (const auto& w : words) rev += w + " ";
    const auto pr = score(x, rev, be, idf);
    CHECK(pr.precision == doctest::Approx(r.precision).epsilon(1e-12));
    CHECK(pr.recall == doctest::Approx(r.recall).epsilon(1e-12));

    CHECK(r.precision >= -1.0);
    CHECK(r.precision <= 1.0 + 1e-12);
    CHECK(r.f_bert >= std::min(r.precision, r.recall) - 1e-12);
    CHECK(r.f_bert <= std::max(r.precision, r.recall) + 1e-12);

    const auto par = score(x, y, be, idf, kernels::Exec::kParallel);
    CHECK(par.precision == r.precision);
    CHECK(par.recall == r.recall);
  }
}

TEST_CASE("f_measure") {
  CHECK(f_measure(0.0, 0.0) == 0.0);
  CHECK(f_measure(1.0, 0.5) == doctest::Approx(2.0 / 3.0));
  CHECK(f_measure(0.8, 0.8) == doctest::Approx(0.8));
  CHECK(f_measure(-0.5, 0.6) == 0.0);
  CHECK(f_measure(-0.5, -0.5) == doctest::Approx(-0.5));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double p = u(rng), r = u(rng), f = f_measure(p, r);
    CHECK(f >= std::min(p, r));
    CHECK(f <= std::max(p, r));
  }
}
