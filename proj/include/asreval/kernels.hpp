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

#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference in
// kernels::serial and an OpenMP version in kernels::parallel with the same
// signature; tests hold the two to agreement and bench/ times them.

#include <cstddef>
#include <span>

namespace asreval::kernels {

enum class Exec { kSerial, kParallel };

// Caps the OpenMP team size; n <= 0 restores the runtime default.
void set_num_threads(int n);
int max_threads();

namespace serial {

// y[r, o] = bias[o] + sum_i x[r, i] * w[o, i]   (w is out_dim x in_dim, row-major)
void linear(std::span<const float> x, std::size_t rows, std::size_t in_dim,
            std::span<const float> w, std::span<const float> bias, std::size_t out_dim,
            std::span<float> y);

// For unit-norm rows a (na x dim) and b (nb x dim): row_max[i] is the best
// dot product of a_i against any b_j, col_max[j] the best for b_j against
// any a_i.
void greedy_max(std::span<const double> a, std::size_t na, std::span<const double> b,
                std::size_t nb, std::size_t dim, std::span<double> row_max,
                std::span<double> col_max);

}  // namespace serial

namespace parallel {

void linear(std::span<const float> x, std::size_t rows, std::size_t in_dim,
            std::span<const float> w, std::span<const float> bias, std::size_t out_dim,
            std::span<float> y);

void greedy_max(std::span<const double> a, std::size_t na, std::span<const double> b,
                std::size_t nb, std::size_t dim, std::span<double> row_max,
                std::span<double> col_max);

}  // namespace parallel

inline void linear(Exec exec, std::span<const float> x, std::size_t rows, std::size_t in_dim,
                   std::span<const float> w, std::span<const float> bias, std::size_t out_dim,
                   std::span<float> y) {
  exec == Exec::kSerial ? serial::linear(x, rows, in_dim, w, bias, out_dim, y)
                        : parallel::linear(x, rows, in_dim, w, bias, out_dim, y);
}

inline void greedy_max(Exec exec, std::span<const double> a, std::size_t na,
                       std::span<const double> b, std::size_t nb, std::size_t dim,
                       std::span<double> row_max, std::span<double> col_max) {
  exec == Exec::kSerial ? serial::greedy_max(a, na, b, nb, dim, row_max, col_max)
                        : parallel::greedy_max(a, na, b, nb, dim, row_max, col_max);
}

}  // namespace asreval::kernels
