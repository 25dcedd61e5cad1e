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

#include <random>

#include "asreval/align.hpp"
#include "asreval/error.hpp"
#include "asreval/text.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace asreval;

namespace {

std::vector<std::string> toks(std::string_view s) { return normalize_for_wer(s).tokens; }

AlignmentResult align_text(std::string_view ref, std::string_view hyp) {
  return align(normalize_for_wer(ref), normalize_for_wer(hyp));
}

}  // namespace

TEST_CASE("utf8 round trip and lowercase") {
  const std::string s = "Beyoncé ÉCOLE Ωmega ß 9:30";
  CHECK(text::encode_utf8(text::decode_utf8(s)) == s);
  CHECK(text::lowercase("Beyoncé ÉCOLE Ωmega") == "beyoncé école ωmega");
  CHECK(text::strip_accents(std::string("beyoncé café naïve")) == "beyonce cafe naive");
}

TEST_CASE("normalize_for_wer") {
  CHECK(toks("Okay, nine thirty five.") == std::vector<std::string>{"okay", "nine", "thirty", "five"});
  CHECK(toks("play Beyoncé") == std::vector<std::string>{"play", "beyoncé"});
  CHECK(toks("").empty());
  CHECK(toks("  \t ").empty());
  CHECK(toks("Okay 9:30 five") == std::vector<std::string>{"okay", "9:30", "five"});
  CHECK(toks("I’m 100% sure!") == std::vector<std::string>{"i'm", "100%", "sure"});
  CHECK(toks("\"Hello\" -- (world)...") == std::vector<std::string>{"hello", "--", "world"});
  CHECK(toks("rock'n'roll ?") == std::vector<std::string>{"rock'n'roll"});
}

TEST_CASE("align examples") {
  auto a = align_text("come right back please", "come right back");
  CHECK(a.n_del == 1);
  CHECK(a.distance() == 1);

  a = align_text("I am a bit overwhelmed.", "I'm a bit overwhelmed");
  CHECK(a.n_sub == 1);
  CHECK(a.n_del == 1);
  CHECK(a.distance() == 2);

  a = align_text("x y z", "x y z");
  CHECK(a.distance() == 0);
  for (const auto& op : a.ops) CHECK(op.kind == EditOp::Kind::kMatch);
}

TEST_CASE("tie break prefers substitution, then insertion, then deletion") {
  // "a b" -> "b c": sub+sub or del+ins both cost 2; substitutions win.
  auto a = align_text("a b", "b c");
  CHECK(a.n_sub == 2);
  CHECK(a.n_ins == 0);
  CHECK(a.n_del == 0);
}

TEST_CASE("compute_wer") {
  auto w = compute_wer(align_text("What are you trying to say to me?", "What are you are you trying to say to me"));
  CHECK(w.wer == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(w.word_accuracy == doctest::Approx(0.75).epsilon(1e-12));

  w = compute_wer(align_text("Here are TV shows by Hugh Griffith", "Here are TV shows by Hugh Griffiths"));
  CHECK(w.word_accuracy == doctest::Approx(6.0 / 7.0).epsilon(1e-12));

  w = compute_wer(align_text("a b", "c d e f g"));
  CHECK(w.wer == 100.0);
  CHECK(w.word_accuracy == 0.0);

  CHECK_THROWS_AS(compute_wer(align_text("", "a b")), DataError);
  CHECK_THROWS_AS(compute_wer(align_text("...", "a")), DataError);
}

TEST_CASE("alignment agrees with brute force and replays both sides") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 2000; ++t) {
    const auto ref = oracle::random_tokens(rng, 6, 4);
    const auto hyp = oracle::random_tokens(rng, 6, 4);
    const auto a = align(NormalizedTokens{ref}, NormalizedTokens{hyp});
    REQUIRE(a.distance() == oracle::edit_distance(ref, hyp));
    CHECK(edit_distance(ref, hyp) == a.distance());
    CHECK(a.ref_tokens() == ref);
    CHECK(a.hyp_tokens() == hyp);
    CHECK(a.n_ref == static_cast<int>(ref.size()));
  }
}

TEST_CASE("alignment properties") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 500; ++t) {
    const auto x = oracle::random_tokens(rng, 8, 5);
    CHECK(align(NormalizedTokens{x}, NormalizedTokens{x}).distance() == 0);
    const auto del = align(NormalizedTokens{x}, NormalizedTokens{});
    CHECK(del.distance() == static_cast<int>(x.size()));
    CHECK(del.n_del == static_cast<int>(x.size()));

    auto y = oracle::random_tokens(rng, 8, 5);
    const int d0 = edit_distance(x, y);
    y.push_back("q");
    CHECK(std::abs(edit_distance(x, y) - d0) <= 1);
  }
}
