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

#include <cmath>
#include <filesystem>
#include <fstream>

#include "asreval/embed.hpp"
#include "asreval/error.hpp"
#include "doctest.h"

using namespace asreval;
namespace fs = std::filesystem;

namespace {

Vocabulary toy_vocab() {
  return Vocabulary::from_tokens({"play", "beyonce", "un", "##believ", "##able", "a", "b", "cafe", "##s", ",", "?"});
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("tokenize strips accents and case") {
  const auto v = toy_vocab();
  const auto a = tokenize("play Beyoncé", v);
  const auto b = tokenize("play Beyonce", v);
  CHECK(a == b);
  CHECK(a.tokens == std::vector<std::string>{"[CLS]", "play", "beyonce", "[SEP]"});
  CHECK(a.is_special == std::vector<bool>{true, false, false, true});
  CHECK(a.ids[1] == v.id("play"));
}

TEST_CASE("tokenize edge cases") {
  const auto v = toy_vocab();
  CHECK(tokenize("", v).tokens == std::vector<std::string>{"[CLS]", "[SEP]"});
  CHECK(tokenize("unbelievable", v).tokens ==
        std::vector<std::string>{"[CLS]", "un", "##believ", "##able", "[SEP]"});
  // Any unmatched remainder turns the whole word into [UNK].
  CHECK(tokenize("unbelievably", v).tokens == std::vector<std::string>{"[CLS]", "[UNK]", "[SEP]"});
  CHECK(tokenize("Cafés, a?", v).tokens ==
        std::vector<std::string>{"[CLS]", "cafe", "##s", ",", "a", "?", "[SEP]"});
  CHECK(basic_tokenize("Hello,world!") == std::vector<std::string>{"hello", ",", "world", "!"});
  CHECK(wordpiece(std::string(101, 'a'), v) == std::vector<std::string>{"[UNK]"});
}

TEST_CASE("tokenize is idempotent on single pieces") {
  const auto v = toy_vocab();
  for (const char* w : {"play", "beyonce", "cafe", "a"}) {
    const auto t = tokenize(w, v);
    REQUIRE(t.size() == 3);
    CHECK(tokenize(t.tokens[1], v) == t);
  }
}

TEST_CASE("vocabulary file") {
  const auto dir = fs::temp_directory_path() / "asreval_test_embed";
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "vocab.txt");
    f << "[PAD]\n[UNK]\n[CLS]\n[SEP]\nhello\n##s\n";
  }
  const auto v = Vocabulary::load(dir / "vocab.txt");
  CHECK(v.size() == 6);
  CHECK(v.id("hello") == 4);
  CHECK(v.unk_id() == 1);
  CHECK(tokenize("hellos", v).tokens == std::vector<std::string>{"[CLS]", "hello", "##s", "[SEP]"});
  CHECK_THROWS_AS(Vocabulary::load(dir / "missing.txt"), Error);
  {
    std::ofstream f(dir / "bad.txt");
    f << "hello\n";
  }
  CHECK_THROWS_AS(Vocabulary::load(dir / "bad.txt"), DataError);
}

TEST_CASE("static backend normalizes rows") {
  auto backend = StaticLookupBackend::load(ASREVAL_FIXTURES "/static_tiny.tsv");
  CHECK(backend->dim() == 4);
  const auto seq = tokenize("a", backend->vocabulary());
  const auto m = embed(seq, *backend);
  REQUIRE(m.rows() == 3);
  CHECK(m.row(1)[0] == doctest::Approx(0.6));
  CHECK(m.row(1)[1] == doctest::Approx(0.8));
  for (std::size_t r = 0; r < m.rows(); ++r) CHECK(norm(m.row(r)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(embed(seq, *backend) == m);
}

TEST_CASE("static backend is position independent") {
  auto backend = StaticLookupBackend::load(ASREVAL_FIXTURES "/static_tiny.tsv");
  const auto& v = backend->vocabulary();
  const auto m1 = embed(tokenize("a b play", v), *backend);
  const auto m2 = embed(tokenize("play a b", v), *backend);
  const std::size_t perm[] = {0, 2, 3, 1, 4};  // row i of m1 is row perm[i] of m2
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t d = 0; d < 4; ++d) CHECK(m1.row(i)[d] == m2.row(perm[i])[d]);
  }
}

TEST_CASE("unknown tokens get stable hashed vectors") {
  const auto h1 = hashed_unit_vector("zebra", 16);
  CHECK(h1 == hashed_unit_vector("zebra", 16));
  CHECK(h1 != hashed_unit_vector("zebras", 16));
  CHECK(norm(h1) == doctest::Approx(1.0).epsilon(1e-12));
  double dot = 0.0;
  const auto h2 = hashed_unit_vector("zebras", 16);
  for (std::size_t i = 0; i < 16; ++i) dot += h1[i] * h2[i];
  CHECK(std::abs(dot) < 0.99);
}

TEST_CASE("static table errors") {
  const auto dir = fs::temp_directory_path() / "asreval_test_embed";
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "ragged.tsv");
    f << "a\t1 2 3\nb\t1 2\n";
  }
  CHECK_THROWS_AS(StaticLookupBackend::load(dir / "ragged.tsv"), DataError);
  CHECK_THROWS_AS(StaticLookupBackend::load(dir / "absent.tsv"), Error);
}
