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
#include <vector>

#include "asreval/kernels.hpp"
#include "doctest.h"

namespace k = asreval::kernels;

namespace {

template <typename T>
std::vector<T> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<T> u(-1, 1);
  std::vector<T> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("linear: serial reference vs naive loop, parallel bitwise equal") {
  k::set_num_threads(4);
  std::mt19937_64 rng(5);
  const std::size_t shapes[][3] = {{1, 1, 1}, {3, 7, 5}, {17, 64, 33}};
  for (const auto& [rows, in, out] : shapes) {
    const auto x = random_vec<float>(rows * in, rng);
    const auto w = random_vec<float>(out * in, rng);
    const auto b = random_vec<float>(out, rng);
    std::vector<float> ys(rows * out), yp(rows * out);
    k::serial::linear(x, rows, in, w, b, out, ys);
    k::parallel::linear(x, rows, in, w, b, out, yp);
    CHECK(ys == yp);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t o = 0; o < out; ++o) {
        double acc = b[o];
        for (std::size_t i = 0; i < in; ++i) acc += static_cast<double>(x[r * in + i]) * w[o * in + i];
        CHECK(ys[r * out + o] == doctest::Approx(acc).epsilon(1e-5));
      }
    }
  }
  k::set_num_threads(0);
}

TEST_CASE("greedy_max: serial vs brute force, parallel bitwise equal") {
  k::set_num_threads(4);
  std::mt19937_64 rng(6);
  const std::size_t shapes[][3] = {{1, 1, 3}, {5, 2, 8}, {40, 31, 16}};
  for (const auto& [na, nb, dim] : shapes) {
    const auto a = random_vec<double>(na * dim, rng);
    const auto b = random_vec<double>(nb * dim, rng);
    std::vector<double> rs(na), cs(nb), rp(na), cp(nb);
    k::serial::greedy_max(a, na, b, nb, dim, rs, cs);
    k::parallel::greedy_max(a, na, b, nb, dim, rp, cp);
    CHECK(rs == rp);
    CHECK(cs == cp);
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        double dot = 0.0;
        for (std::size_t d = 0; d < dim; ++d) dot += a[i * dim + d] * b[j * dim + d];
        CHECK(dot <= rs[i] + 1e-12);
        CHECK(dot <= cs[j] + 1e-12);
      }
    }
  }
  k::set_num_threads(0);
}
