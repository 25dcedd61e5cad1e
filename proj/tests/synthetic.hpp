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

// Random corpora for scoring tests.
#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "asreval/corpus.hpp"
#include "json.hpp"

namespace synthetic {

using asreval::Severity;
using asreval::Utterance;

inline void write_corpus(const std::filesystem::path& path, const std::vector<Utterance>& corpus) {
  std::ofstream f(path);
  for (const auto& u : corpus) {
    nlohmann::json j{{"id", u.id},
                     {"speaker_id", u.speaker_id},
                     {"severity", std::string(asreval::to_string(u.severity))},
                     {"reference", u.reference},
                     {"hypothesis", u.hypothesis}};
    f << j.dump() << "\n";
  }
}

inline std::vector<Utterance> synthetic_corpus(std::size_t n, std::uint64_t seed) {
  const char* words[] = {"play", "a", "b", "please", "come", "back", "right", "nine", "9", "i'm", "i", "am",
                         "there", "their", "color", "colour", "Hugh", "Griffith"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> w(0, 17), len(1, 9), edit(0, 3);
  std::vector<Utterance> c;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> ref;
    for (int k = len(rng); k > 0; --k) ref.push_back(words[w(rng)]);
    auto hyp = ref;
    for (int k = edit(rng); k > 0 && !hyp.empty(); --k) {
      std::uniform_int_distribution<std::size_t> at(0, hyp.size() - 1);
      hyp[at(rng)] = words[w(rng)];
    }
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
      return s;
    };
    c.push_back({"utt" + std::to_string(i), "spk" + std::to_string(i % 7), static_cast<Severity>(i % 4),
                 join(ref), join(hyp)});
  }
  return c;
}

}  // namespace synthetic
