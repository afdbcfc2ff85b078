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

#include "billboard/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "billboard/errors.hpp"
#include "billboard/kernels.hpp"

namespace billboard {
namespace {

constexpr int kBisectionSteps = 60;

/// Sufficient statistics for coordinate descent.
struct Gram {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> xtx;     // p x p, row-major
  std::vector<double> xty;     // p
  std::vector<double> colsum;  // p
  double ysum = 0.0;

  explicit Gram(const RegressionProblem& prob) : n(prob.rows), p(prob.cols()) {
    xtx.resize(p * p);
    xty.resize(p);
    colsum.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
      const auto xj = prob.column(j);
      xty[j] = kernels::dot(xj, prob.target);
      colsum[j] = kernels::sum(xj);
      for (std::size_t m = j; m < p; ++m) {
        const double v = kernels::dot(xj, prob.column(m));
        xtx[j * p + m] = v;
        xtx[m * p + j] = v;
      }
    }
    ysum = kernels::sum(prob.target);
  }

  double intercept_at_zero() const { return ysum / static_cast<double>(n); }

  /// c_j evaluated at w = 0 with the intercept at mean(y).
  double correlation_at_zero(std::size_t j) const {
    return xty[j] - intercept_at_zero() * colsum[j];
  }
};

double soft_threshold(double c, double t) {
  const double mag = std::abs(c) - t;
  if (mag <= 0.0) return 0.0;
  return c > 0.0 ? mag : -mag;
}

LassoFit fit_gram(const Gram& g, double lambda, const LassoOptions& opt) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("lasso_fit: lambda must be finite and >= 0");
  }
  LassoFit fit;
  fit.weights.assign(g.p, 0.0);
  fit.intercept = g.intercept_at_zero();
  const double half = 0.5 * lambda;
  const double n = static_cast<double>(g.n);
  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < g.p; ++j) {
      const double* row = g.xtx.data() + j * g.p;
      const double a = row[j];
      const double others =
          g.p == 0 ? 0.0 : kernels::active().dot(row, fit.weights.data(), g.p) - a * fit.weights[j];
      const double c = g.xty[j] - fit.intercept * g.colsum[j] - others;
      const double updated = soft_threshold(c, half) / a;
      max_change = std::max(max_change, std::abs(updated - fit.weights[j]));
      fit.weights[j] = updated;
    }
    const double intercept =
        (g.ysum - kernels::active().dot(g.colsum.data(), fit.weights.data(), g.p)) / n;
    max_change = std::max(max_change, std::abs(intercept - fit.intercept));
    fit.intercept = intercept;
    fit.sweeps = sweep;
    fit.last_change = max_change;
    if (max_change < opt.tolerance) return fit;
  }
  throw ConvergenceError("lasso_fit did not converge after " + std::to_string(opt.max_sweeps) +
                             " sweeps (last max change " + std::to_string(fit.last_change) + ")",
                         fit.last_change);
}

double lambda_max_gram(const Gram& g) {
  double best = 0.0;
  for (std::size_t j = 0; j < g.p; ++j) best = std::max(best, std::abs(g.correlation_at_zero(j)));
  return 2.0 * best;
}

}  // namespace

RegressionProblem RegressionProblem::from_columns(const std::vector<std::vector<double>>& columns,
                                                  std::vector<double> target,
                                                  std::vector<std::string> column_ids,
                                                  std::vector<int> row_groups) {
  RegressionProblem prob;
  prob.rows = target.size();
  prob.target = std::move(target);
  prob.column_ids = std::move(column_ids);
  prob.row_groups = std::move(row_groups);
  prob.design.reserve(columns.size() * prob.rows);
  for (const auto& c : columns) {
    if (c.size() != prob.rows) throw ValidationError("design column length differs from target");
    prob.design.insert(prob.design.end(), c.begin(), c.end());
  }
  if (prob.column_ids.empty()) {
    for (std::size_t j = 0; j < columns.size(); ++j) prob.column_ids.push_back("x" + std::to_string(j));
  }
  return prob;
}

void RegressionProblem::validate() const {
  if (rows == 0) throw ValidationError("regression problem has no rows");
  if (design.size() % rows != 0) throw ValidationError("design size is not a multiple of rows");
  if (target.size() != rows) throw ValidationError("target length differs from row count");
  if (column_ids.size() != cols()) throw ValidationError("column ids do not match design");
  if (!row_groups.empty() && row_groups.size() != rows) {
    throw ValidationError("row groups do not match row count");
  }
  for (double v : design) {
    if (!std::isfinite(v)) throw ValidationError("design contains non-finite values");
  }
  for (double v : target) {
    if (!std::isfinite(v)) throw ValidationError("target contains non-finite values");
  }
  for (std::size_t j = 0; j < cols(); ++j) {
    const auto c = column(j);
    if (std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; })) {
      throw DegenerateError("design column '" + column_ids[j] + "' is identically zero");
    }
  }
}

std::size_t LassoFit::support() const {
  return static_cast<std::size_t>(
      std::count_if(weights.begin(), weights.end(), [](double w) { return w != 0.0; }));
}

LassoFit lasso_fit(const RegressionProblem& problem, double lambda, const LassoOptions& options) {
  problem.validate();
  return fit_gram(Gram(problem), lambda, options);
}

double lambda_max(const RegressionProblem& problem) {
  problem.validate();
  return lambda_max_gram(Gram(problem));
}

double lasso_objective(const RegressionProblem& problem, std::span<const double> weights,
                       double intercept, double lambda) {
  std::vector<double> resid(problem.target);
  for (double& r : resid) r -= intercept;
  for (std::size_t j = 0; j < problem.cols(); ++j) {
    if (weights[j] != 0.0) kernels::axpy(-weights[j], problem.column(j), resid);
  }
  double l1 = 0.0;
  for (double w : weights) l1 += std::abs(w);
  return kernels::dot(resid, resid) + lambda * l1;
}

std::vector<double> predict(const RegressionProblem& problem, const LassoFit& fit) {
  std::vector<double> out(problem.rows, fit.intercept);
  for (std::size_t j = 0; j < problem.cols(); ++j) {
    if (fit.weights[j] != 0.0) kernels::axpy(fit.weights[j], problem.column(j), out);
  }
  return out;
}

LambdaTuning tune_lambda(const RegressionProblem& problem, std::size_t target_support,
                         const LassoOptions& options) {
  problem.validate();
  if (problem.cols() < target_support) {
    throw ValidationError("tune_lambda: " + std::to_string(problem.cols()) +
                          " columns cannot reach support " + std::to_string(target_support));
  }
  const Gram gram(problem);
  const double hi_start = lambda_max_gram(gram);

  LambdaTuning exact;
  bool have_exact = false;
  LambdaTuning fallback;
  fallback.lambda = hi_start;
  fallback.fit = fit_gram(gram, hi_start, options);
  fallback.support = fallback.fit.support();
  fallback.inexact_support = true;
  if (fallback.support == target_support) {
    exact = fallback;
    exact.inexact_support = false;
    have_exact = true;
  }

  double lo = 0.0;
  double hi = hi_start;
  for (int step = 0; step < kBisectionSteps; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > 0.0) || mid == lo || mid == hi) break;
    LassoFit fit = fit_gram(gram, mid, options);
    const std::size_t support = fit.support();
    if (support == target_support && (!have_exact || mid > exact.lambda)) {
      exact = {mid, support, false, fit};
      have_exact = true;
    }
    if (support <= target_support && mid < fallback.lambda) {
      fallback = {mid, support, true, std::move(fit)};
    }
    if (support >= target_support) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return have_exact ? exact : fallback;
}

}  // namespace billboard
