/*
 * Copyright 2026 The Billboard Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <span>
#include <string_view>
#include <vector>

// Dense double-precision reductions used by the correlation and regression
// code. Each operation has a scalar reference implementation and, where the
// target supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The active
// variant is picked once at startup from the CPU feature bits; setting
// BILLBOARD_SIMD=scalar forces the reference path.

namespace billboard::kernels {

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend backend);

struct KernelTable {
  Backend backend;
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i (x_i - mx) * (y_i - my)
  double (*centered_dot)(const double* x, double mx, const double* y, double my,
                         std::size_t n);
  // y_i += alpha * x_i
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();
#if defined(BILLBOARD_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(BILLBOARD_HAVE_NEON)
const KernelTable& neon_table();
#endif

/// Backends compiled in and supported by the running CPU, scalar first.
std::vector<Backend> available_backends();
const KernelTable& table_for(Backend backend);
const KernelTable& active();

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y);
double centered_dot(std::span<const double> x, double mx, std::span<const double> y,
                    double my);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

inline double mean(std::span<const double> x) {
  return x.empty() ? 0.0 : sum(x) / static_cast<double>(x.size());
}

}  // namespace billboard::kernels
