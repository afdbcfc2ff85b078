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
#include <string>
#include <vector>

namespace billboard {

/// Least-squares problem over metric columns. The design is stored column-major.
struct RegressionProblem {
  std::size_t rows = 0;
  std::vector<std::string> column_ids;
  std::vector<double> design;
  std::vector<double> target;
  std::vector<int> row_groups;

  static RegressionProblem from_columns(const std::vector<std::vector<double>>& columns,
                                        std::vector<double> target,
                                        std::vector<std::string> column_ids = {},
                                        std::vector<int> row_groups = {});

  std::size_t cols() const noexcept { return rows == 0 ? 0 : design.size() / rows; }
  std::span<const double> column(std::size_t j) const {
    return {design.data() + j * rows, rows};
  }
  /// Shapes agree, values finite, no all-zero column.
  void validate() const;
};

struct LassoOptions {
  double tolerance = 1e-10;
  int max_sweeps = 10000;
};

struct LassoFit {
  std::vector<double> weights;
  double intercept = 0.0;
  int sweeps = 0;
  double last_change = 0.0;

  std::size_t support() const;
};

/// Minimizes  sum_n (y_n - b - x_n . w)^2 + lambda * |w|_1  with an unpenalized
/// intercept b by cyclic coordinate descent with soft-thresholding,
///   w_j <- S(c_j, lambda / 2) / a_j,   a_j = |x_j|^2,
///   c_j = x_j . (y - b - sum_{m != j} w_m x_m),
/// re-centering b after each sweep. The sweep runs on the Gram matrix X'X, so
/// its cost does not depend on the number of rows. Throws ConvergenceError when
/// the largest coordinate change is still >= tolerance after max_sweeps.
LassoFit lasso_fit(const RegressionProblem& problem, double lambda,
                   const LassoOptions& options = {});

/// 2 * max_j |x_j . (y - mean(y))|: the smallest lambda with an all-zero solution.
double lambda_max(const RegressionProblem& problem);

double lasso_objective(const RegressionProblem& problem, std::span<const double> weights,
                       double intercept, double lambda);

std::vector<double> predict(const RegressionProblem& problem, const LassoFit& fit);

struct LambdaTuning {
  double lambda = 0.0;
  std::size_t support = 0;
  bool inexact_support = false;
  LassoFit fit;
};

/// Bisection (60 steps) on lambda in (0, lambda_max] for the largest lambda
/// whose support is exactly `target_support`. If that support is never hit,
/// returns the smallest tested lambda with support <= target and sets
/// inexact_support.
LambdaTuning tune_lambda(const RegressionProblem& problem, std::size_t target_support = 3,
                         const LassoOptions& options = {});

}  // namespace billboard
