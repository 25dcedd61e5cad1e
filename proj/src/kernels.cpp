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

#include "asreval/kernels.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace asreval::kernels {

void set_num_threads(int n) {
#ifdef _OPENMP
  static const int default_threads = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : default_threads);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

void linear(std::span<const float> x, std::size_t rows, std::size_t in_dim,
            std::span<const float> w, std::span<const float> bias, std::size_t out_dim,
            std::span<float> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const float* xr = x.data() + r * in_dim;
    for (std::size_t o = 0; o < out_dim; ++o) {
      const float* wo = w.data() + o * in_dim;
      float acc = bias.empty() ? 0.0f : bias[o];
      for (std::size_t i = 0; i < in_dim; ++i) acc += xr[i] * wo[i];
      y[r * out_dim + o] = acc;
    }
  }
}

void greedy_max(std::span<const double> a, std::size_t na, std::span<const double> b,
                std::size_t nb, std::size_t dim, std::span<double> row_max,
                std::span<double> col_max) {
  constexpr double kLowest = std::numeric_limits<double>::lowest();
  std::fill(row_max.begin(), row_max.begin() + na, kLowest);
  std::fill(col_max.begin(), col_max.begin() + nb, kLowest);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      double dot = 0.0;
      for (std::size_t d = 0; d < dim; ++d) dot += a[i * dim + d] * b[j * dim + d];
      row_max[i] = std::max(row_max[i], dot);
      col_max[j] = std::max(col_max[j], dot);
    }
  }
}

}  // namespace serial

namespace parallel {

void linear(std::span<const float> x, std::size_t rows, std::size_t in_dim,
            std::span<const float> w, std::span<const float> bias, std::size_t out_dim,
            std::span<float> y) {
  const auto n_rows = static_cast<long long>(rows);
  const auto n_out = static_cast<long long>(out_dim);
#pragma omp parallel for collapse(2) schedule(static)
  for (long long r = 0; r < n_rows; ++r) {
    for (long long o = 0; o < n_out; ++o) {
      const float* xr = x.data() + r * in_dim;
      const float* wo = w.data() + o * in_dim;
      float acc = bias.empty() ? 0.0f : bias[o];
      for (std::size_t i = 0; i < in_dim; ++i) acc += xr[i] * wo[i];
      y[r * out_dim + o] = acc;
    }
  }
}

void greedy_max(std::span<const double> a, std::size_t na, std::span<const double> b,
                std::size_t nb, std::size_t dim, std::span<double> row_max,
                std::span<double> col_max) {
  // Full similarity matrix first so both reductions are race-free.
  std::vector<double> sim(na * nb);
  const auto n_a = static_cast<long long>(na);
  const auto n_b = static_cast<long long>(nb);
#pragma omp parallel for collapse(2) schedule(static)
  for (long long i = 0; i < n_a; ++i) {
    for (long long j = 0; j < n_b; ++j) {
      double dot = 0.0;
      for (std::size_t d = 0; d < dim; ++d) dot += a[i * dim + d] * b[j * dim + d];
      sim[i * nb + j] = dot;
    }
  }
  constexpr double kLowest = std::numeric_limits<double>::lowest();
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n_a; ++i) {
    double best = kLowest;
    for (std::size_t j = 0; j < nb; ++j) best = std::max(best, sim[i * nb + j]);
    row_max[i] = best;
  }
#pragma omp parallel for schedule(static)
  for (long long j = 0; j < n_b; ++j) {
    double best = kLowest;
    for (std::size_t i = 0; i < na; ++i) best = std::max(best, sim[i * nb + j]);
    col_max[j] = best;
  }
}

}  // namespace parallel
}  // namespace asreval::kernels
