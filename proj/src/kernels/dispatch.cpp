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

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "billboard/kernels.hpp"

namespace billboard::kernels {
namespace {

bool cpu_supports(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(BILLBOARD_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(BILLBOARD_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& select_table() {
  if (const char* forced = std::getenv("BILLBOARD_SIMD")) {
    const std::string name(forced);
    if (name == "scalar") return scalar_table();
    for (Backend b : available_backends()) {
      if (backend_name(b) == name) return table_for(b);
    }
  }
  auto backends = available_backends();
  return table_for(backends.back());
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands differ in length");
}

}  // namespace

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::scalar};
  for (Backend b : {Backend::avx2, Backend::neon}) {
    if (cpu_supports(b)) out.push_back(b);
  }
  return out;
}

const KernelTable& table_for(Backend backend) {
  switch (backend) {
#if defined(BILLBOARD_HAVE_AVX2)
    case Backend::avx2:
      return avx2_table();
#endif
#if defined(BILLBOARD_HAVE_NEON)
    case Backend::neon:
      return neon_table();
#endif
    default:
      return scalar_table();
  }
}

const KernelTable& active() {
  static const KernelTable& table = select_table();
  return table;
}

double dot(std::span<const double> x, std::span<const double> y) {
  check_sizes(x.size(), y.size());
  return active().dot(x.data(), y.data(), x.size());
}

double centered_dot(std::span<const double> x, double mx, std::span<const double> y,
                    double my) {
  check_sizes(x.size(), y.size());
  return active().centered_dot(x.data(), mx, y.data(), my, x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace billboard::kernels
