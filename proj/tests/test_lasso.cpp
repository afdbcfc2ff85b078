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

#include <cmath>
#include <iostream>
#include <random>

#include <Eigen/Dense>

#include <gtest/gtest.h>

#include "billboard/errors.hpp"
#include "billboard/lasso.hpp"

namespace billboard {
namespace {

RegressionProblem random_problem(std::size_t n, std::size_t p, unsigned seed, double rho = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<std::vector<double>> cols(p, std::vector<double>(n));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double common = n01(rng);
    for (std::size_t j = 0; j < p; ++j) cols[j][i] = rho * common + n01(rng) + 0.5 * j;
    y[i] = 2.0 + 1.5 * cols[0][i] - 0.8 * (p > 1 ? cols[1][i] : 0.0) + n01(rng);
  }
  return RegressionProblem::from_columns(cols, y);
}

/// FISTA on the centered problem, independent of the coordinate-descent path.
std::pair<Eigen::VectorXd, double> proximal_oracle(const RegressionProblem& prob, double lambda) {
  const auto n = static_cast<Eigen::Index>(prob.rows);
  const auto p = static_cast<Eigen::Index>(prob.cols());
  Eigen::MatrixXd x = Eigen::Map<const Eigen::MatrixXd>(prob.design.data(), n, p);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(prob.target.data(), n);
  const Eigen::RowVectorXd xm = x.colwise().mean();
  const double ym = y.mean();
  x.rowwise() -= xm;
  y.array() -= ym;
  const Eigen::MatrixXd g = 2.0 * x.transpose() * x;
  const Eigen::VectorXd gy = 2.0 * x.transpose() * y;
  const double lip = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().maxCoeff();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p), z = w;
  double t = 1.0;
  for (int it = 0; it < 200000; ++it) {
    const Eigen::VectorXd v = z - (g * z - gy) / lip;
    Eigen::VectorXd next(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      const double m = std::abs(v[j]) - lambda / lip;
      next[j] = m > 0 ? std::copysign(m, v[j]) : 0.0;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / tn) * (next - w);
    w = next;
    t = tn;
  }
  return {w, ym - xm.dot(w)};
}

TEST(Lasso, OlsSingleColumn) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2.1, 3.9, 6.2, 7.8, 10.1};
  const auto prob = RegressionProblem::from_columns({x}, y);
  const auto fit = lasso_fit(prob, 0.0);
  // slope = Sxy / Sxx = 19.9 / 10
  EXPECT_NEAR(fit.weights[0], 1.99, 1e-9);
  EXPECT_NEAR(fit.intercept, 6.02 - 1.99 * 3.0, 1e-9);
}

TEST(Lasso, SingleColumnSoftThreshold) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2.1, 3.9, 6.2, 7.8, 10.1};
  const auto prob = RegressionProblem::from_columns({x}, y);
  for (double lambda : {1.0, 10.0, 39.0}) {
    const auto fit = lasso_fit(prob, lambda);
    EXPECT_NEAR(fit.weights[0], (19.9 - lambda / 2) / 10.0, 1e-9) << lambda;
  }
  EXPECT_NEAR(lambda_max(prob), 2.0 * 19.9, 1e-9);
  EXPECT_EQ(lasso_fit(prob, 39.8).weights[0], 0.0);
}

TEST(Lasso, LambdaMaxGivesEmptySupport) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto prob = random_problem(50, 6, seed);
    const double lmax = lambda_max(prob);
    const auto at = lasso_fit(prob, lmax);
    EXPECT_EQ(at.support(), 0u);
    double ybar = 0.0;
    for (double v : prob.target) ybar += v;
    EXPECT_NEAR(at.intercept, ybar / 50.0, 1e-12);
    EXPECT_GE(lasso_fit(prob, lmax * (1 - 1e-6)).support(), 1u);
  }
}

TEST(Lasso, SupportAlongTheLambdaPath) {
  int violations = 0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto prob = random_problem(60, 8, 400 + seed, 0.9);
    const double lmax = lambda_max(prob);
    std::size_t previous = prob.cols();
    for (int step = 0; step <= 40; ++step) {
      const std::size_t s = lasso_fit(prob, lmax * step / 40.0).support();
      if (s > previous) ++violations;
      previous = s;
    }
  }
  RecordProperty("support_increases", violations);
  std::cout << "support increased along the lambda grid " << violations << " times\n";
}

TEST(Lasso, ConstantTargetGivesZeroWeights) {
  auto prob = random_problem(30, 4, 9);
  std::fill(prob.target.begin(), prob.target.end(), 3.5);
  EXPECT_NEAR(lambda_max(prob), 0.0, 1e-9);
  const auto fit = lasso_fit(prob, 0.1);
  EXPECT_EQ(fit.support(), 0u);
  EXPECT_NEAR(fit.intercept, 3.5, 1e-12);
}

TEST(Lasso, MatchesProximalOracle) {
  const auto prob = random_problem(20, 4, 21, 0.8);
  for (double lambda : {0.0, 1.0, 5.0, 20.0}) {
    const auto fit = lasso_fit(prob, lambda);
    const auto [w, b] = proximal_oracle(prob, lambda);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(fit.weights[j], w[j], 1e-7) << lambda;
    EXPECT_NEAR(fit.intercept, b, 1e-7);
    const std::vector<double> wv(w.data(), w.data() + 4);
    EXPECT_LE(lasso_objective(prob, fit.weights, fit.intercept, lambda),
              lasso_objective(prob, wv, b, lambda) + 1e-9);
  }
}

TEST(Lasso, KktConditions) {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto prob = random_problem(80, 8, 100 + seed, 0.6);
    const double lambda = 0.3 * lambda_max(prob);
    const auto fit = lasso_fit(prob, lambda);
    const auto pred = predict(prob, fit);
    double resid_sum = 0.0;
    std::vector<double> r(prob.rows);
    for (std::size_t i = 0; i < prob.rows; ++i) {
      r[i] = prob.target[i] - pred[i];
      resid_sum += r[i];
    }
    EXPECT_NEAR(resid_sum, 0.0, 1e-8);
    for (std::size_t j = 0; j < prob.cols(); ++j) {
      double g = 0.0;
      for (std::size_t i = 0; i < prob.rows; ++i) g += 2.0 * prob.column(j)[i] * r[i];
      if (fit.weights[j] != 0.0) {
        EXPECT_NEAR(g, lambda * (fit.weights[j] > 0 ? 1 : -1), 1e-6 * lambda);
      } else {
        EXPECT_LE(std::abs(g), lambda * (1 + 1e-9));
      }
    }
  }
}

TEST(Lasso, ConvergenceFailure) {
  const auto prob = random_problem(40, 5, 4, 5.0);
  LassoOptions opt;
  opt.max_sweeps = 1;
  try {
    lasso_fit(prob, 0.0, opt);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_change(), opt.tolerance);
  }
}

TEST(Lasso, InputValidation) {
  EXPECT_THROW(RegressionProblem::from_columns({{1, 2}}, {1, 2, 3}), ValidationError);
  const auto zero = RegressionProblem::from_columns({{0, 0, 0}, {1, 2, 3}}, {1, 2, 3});
  EXPECT_THROW(lasso_fit(zero, 0.0), DegenerateError);
  const auto nan = RegressionProblem::from_columns({{1, NAN, 3}}, {1, 2, 3});
  EXPECT_THROW(lasso_fit(nan, 0.0), ValidationError);
  const auto ok = RegressionProblem::from_columns({{1, 2, 4}}, {1, 2, 3});
  EXPECT_THROW(lasso_fit(ok, -1.0), ValidationError);
}

TEST(TuneLambda, ReachesTargetSupport) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto prob = random_problem(100, 7, 300 + seed, 0.5);
    const auto t = tune_lambda(prob, 3);
    EXPECT_FALSE(t.inexact_support);
    EXPECT_EQ(t.support, 3u);
    EXPECT_EQ(t.fit.support(), 3u);
    EXPECT_GT(t.lambda, 0.0);
    EXPECT_LE(t.lambda, lambda_max(prob));
    EXPECT_EQ(lasso_fit(prob, t.lambda).weights, t.fit.weights);
  }
}

TEST(TuneLambda, UnreachableSupportIsInexact) {
  const std::vector<double> x1{1, -1, 0, 0};
  const std::vector<double> x2{0, 0, 1, -1};
  const std::vector<double> x3{1, 1, -1, -1};
  std::vector<double> y(4);
  for (int i = 0; i < 4; ++i) y[i] = x1[i] + 2 * x2[i];
  const auto prob = RegressionProblem::from_columns({x1, x2, x3}, y);
  const auto t = tune_lambda(prob, 3);
  EXPECT_TRUE(t.inexact_support);
  EXPECT_EQ(t.support, 2u);
  EXPECT_EQ(t.fit.weights[2], 0.0);
}

TEST(TuneLambda, TooFewColumns) {
  const auto prob = random_problem(20, 2, 1);
  EXPECT_THROW(tune_lambda(prob, 3), ValidationError);
}

}  // namespace
}  // namespace billboard
