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

// Serial vs OpenMP timings for the two hot kernels.
//
//   bench_kernels [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "asreval/kernels.hpp"

namespace {

using Clock = std::chrono::steady_clock;
namespace k = asreval::kernels;

template <typename F>
double best_ms(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    f();
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (ms < best) best = ms;
  }
  return best;
}

std::vector<float> random_floats(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<double> random_doubles(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
  std::mt19937_64 rng(7);
  std::printf("threads: %d\n", k::max_threads());
  std::printf("%-28s %10s %10s %8s\n", "kernel", "serial_ms", "omp_ms", "speedup");

  // BERT-base sized projections: 128 tokens, 768 -> 768 and 768 -> 3072.
  for (std::size_t out_dim : {768u, 3072u}) {
    const std::size_t rows = 128, in_dim = 768;
    const auto x = random_floats(rows * in_dim, rng);
    const auto w = random_floats(out_dim * in_dim, rng);
    const auto b = random_floats(out_dim, rng);
    std::vector<float> y(rows * out_dim);
    const double s = best_ms(repeats, [&] { k::serial::linear(x, rows, in_dim, w, b, out_dim, y); });
    const double p = best_ms(repeats, [&] { k::parallel::linear(x, rows, in_dim, w, b, out_dim, y); });
    char name[64];
    std::snprintf(name, sizeof name, "linear 128x768->%zu", out_dim);
    std::printf("%-28s %10.3f %10.3f %8.2f\n", name, s, p, s / p);
  }

  for (std::size_t n : {32u, 128u, 512u}) {
    const std::size_t dim = 768;
    const auto a = random_doubles(n * dim, rng);
    const auto bm = random_doubles(n * dim, rng);
    std::vector<double> row_max(n), col_max(n);
    const double s = best_ms(repeats, [&] { k::serial::greedy_max(a, n, bm, n, dim, row_max, col_max); });
    const double p = best_ms(repeats, [&] { k::parallel::greedy_max(a, n, bm, n, dim, row_max, col_max); });
    char name[64];
    std::snprintf(name, sizeof name, "greedy_max %zux%zu d=768", n, n);
    std::printf("%-28s %10.3f %10.3f %8.2f\n", name, s, p, s / p);
  }
  return 0;
}
