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
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "billboard/ensemble.hpp"
#include "billboard/errors.hpp"
#include "billboard/mixed_effects.hpp"
#include "test_util.hpp"

namespace billboard {
namespace {

struct Truth {
  double intercept = 0.2;
  double beta0 = 0.5;
  double beta1 = 1.5;
  double sigma_gamma = 0.7;
  double sigma_eps = 0.4;
};

MixedDesign simulate(const Truth& t, std::size_t gens, std::size_t groups, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> gamma(groups);
  for (double& g : gamma) g = t.sigma_gamma * n01(rng);
  MixedDesign d;
  d.metric_id = "sim";
  for (std::size_t g = 0; g < gens; ++g) {
    const double flag = g == 0 ? 0.0 : 1.0;
    for (std::size_t k = 0; k < groups; ++k) {
      const double h = 0.3 * static_cast<double>(g) + n01(rng);
      d.machine_flag.push_back(flag);
      d.h.push_back(h);
      d.example.push_back(static_cast<int>(k));
      d.y.push_back(t.intercept + t.beta0 * flag + t.beta1 * h + gamma[k] + t.sigma_eps * n01(rng));
    }
  }
  return d;
}

struct Dense {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::MatrixXd z;
};

Dense dense(const MixedDesign& d) {
  const auto n = static_cast<Eigen::Index>(d.rows());
  const int groups = *std::max_element(d.example.begin(), d.example.end()) + 1;
  Dense out{Eigen::MatrixXd(n, 3), Eigen::VectorXd(n), Eigen::MatrixXd::Zero(n, groups)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.x(i, 0) = 1.0;
    out.x(i, 1) = d.machine_flag[i];
    out.x(i, 2) = d.h[i];
    out.y[i] = d.y[i];
    out.z(i, d.example[i]) = 1.0;
  }
  return out;
}

/// -2 restricted log-likelihood with sigma^2 profiled, evaluated with dense matrices.
double dense_reml(const Dense& m, double rho, Eigen::Vector3d* beta = nullptr) {
  const auto n = m.x.rows();
  const Eigen::MatrixXd v =
      Eigen::MatrixXd::Identity(n, n) + rho * m.z * m.z.transpose();
  const Eigen::LLT<Eigen::MatrixXd> llt(v);
  const Eigen::MatrixXd vx = llt.solve(m.x);
  const Eigen::Matrix3d a = m.x.transpose() * vx;
  const Eigen::Vector3d b = a.ldlt().solve(vx.transpose() * m.y);
  if (beta != nullptr) *beta = b;
  const Eigen::VectorXd r = m.y - m.x * b;
  const double dof = static_cast<double>(n - 3);
  const double sigma2 = r.dot(llt.solve(r)) / dof;
  const double log_det_v = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return dof * (1 + std::log(2 * std::numbers::pi * sigma2)) + log_det_v + std::log(a.determinant());
}

TEST(MixedEffects, CriterionMatchesDenseOracle) {
  const MixedDesign d = simulate({}, 4, 15, 1);
  const Dense m = dense(d);
  for (double rho : {0.0, 1e-4, 0.1, 1.0, 3.0, 100.0}) {
    EXPECT_NEAR(reml_criterion(d, rho), dense_reml(m, rho), 1e-8 * std::abs(dense_reml(m, rho)))
        << rho;
  }
}

TEST(MixedEffects, ProfiledFitMatchesDenseOptimum) {
  const MixedDesign d = simulate({}, 4, 15, 2);
  const Dense m = dense(d);
  // coarse scan, then golden refinement on the dense criterion
  double best_t = -8, best_f = INFINITY;
  for (double t = -8; t <= 8; t += 0.01) {
    const double f = dense_reml(m, std::pow(10, t));
    if (f < best_f) best_f = f, best_t = t;
  }
  double lo = best_t - 0.01, hi = best_t + 0.01;
  for (int i = 0; i < 100; ++i) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (dense_reml(m, std::pow(10, m1)) < dense_reml(m, std::pow(10, m2))) hi = m2; else lo = m1;
  }
  const double rho = std::pow(10, 0.5 * (lo + hi));
  Eigen::Vector3d beta;
  dense_reml(m, rho, &beta);
  const auto fit = profiled_fit(d);
  EXPECT_NEAR(std::log10(fit.rho), std::log10(rho), 1e-5);
  EXPECT_NEAR(fit.beta0, beta[1], 1e-8);
  EXPECT_NEAR(fit.beta1, beta[2], 1e-8);
  EXPECT_NEAR(fit.intercept, beta[0], 1e-8);
  EXPECT_LE(fit.reml_deviance, dense_reml(m, rho) + 1e-9);
}

TEST(MixedEffects, ZeroRatioIsOrdinaryLeastSquares) {
  const MixedDesign d = simulate({}, 3, 20, 3);
  const Dense m = dense(d);
  const Eigen::Matrix3d xtx = m.x.transpose() * m.x;
  const Eigen::Vector3d beta = xtx.ldlt().solve(m.x.transpose() * m.y);
  const Eigen::VectorXd r = m.y - m.x * beta;
  const double s2 = r.squaredNorm() / static_cast<double>(m.x.rows() - 3);
  const auto fit = fit_at_ratio(d, 0.0);
  EXPECT_NEAR(fit.beta0, beta[1], 1e-12);
  EXPECT_NEAR(fit.beta1, beta[2], 1e-12);
  EXPECT_NEAR(fit.sigma_eps_sq, s2, 1e-12);
  EXPECT_NEAR(fit.se_beta0, std::sqrt(s2 * xtx.inverse()(1, 1)), 1e-12);
  EXPECT_EQ(fit.sigma_gamma_sq, 0.0);
  EXPECT_NEAR(fit.ci90_hi - fit.ci90_lo, 2 * kNormalQuantile95 * fit.se_beta0, 1e-12);
}

TEST(MixedEffects, RecoversCoefficientsWithLittleNoise) {
  Truth t;
  t.sigma_eps = 1e-3;
  const auto fit = profiled_fit(simulate(t, 5, 60, 4));
  EXPECT_NEAR(fit.beta0, t.beta0, 2e-3);
  EXPECT_NEAR(fit.beta1, t.beta1, 2e-3);
  EXPECT_NEAR(fit.sigma_eps_sq, 1e-6, 3e-7);
  EXPECT_GT(fit.rho, 1e4);
  EXPECT_EQ(classify(fit), Significance::positive);
}

TEST(MixedEffects, SignAntisymmetry) {
  MixedDesign d = simulate({}, 4, 30, 5);
  const auto a = profiled_fit(d);
  for (double& v : d.y) v = -v;
  const auto b = profiled_fit(d);
  EXPECT_NEAR(b.beta0, -a.beta0, 1e-10);
  EXPECT_NEAR(b.se_beta0, a.se_beta0, 1e-10);
  EXPECT_NEAR(b.rho, a.rho, 1e-6 * a.rho + 1e-12);
}

TEST(MixedEffects, AffineInvarianceOfTarget) {
  MixedDesign d = simulate({}, 4, 30, 6);
  const auto a = profiled_fit(d);
  for (double& v : d.y) v = 3.0 * v - 7.0;
  const auto b = profiled_fit(d);
  EXPECT_NEAR(b.beta0, 3.0 * a.beta0, 1e-7);
  EXPECT_NEAR(b.se_beta0, 3.0 * a.se_beta0, 1e-7);
  EXPECT_NEAR(std::log10(b.rho), std::log10(a.rho), 1e-6);
}

TEST(MixedEffects, NoGroupEffectPrefersBoundary) {
  Truth t;
  t.sigma_gamma = 0.0;
  MixedDesign d = simulate(t, 4, 30, 7);
  // constant per-group offsets removed exactly: criterion cannot prefer rho > 0 by much
  const auto fit = profiled_fit(d);
  EXPECT_LT(fit.sigma_gamma_sq, 0.05);
}

TEST(MixedEffects, SingularDesigns) {
  MixedDesign d = simulate({}, 3, 10, 8);
  MixedDesign all_machine = d;
  std::fill(all_machine.machine_flag.begin(), all_machine.machine_flag.end(), 1.0);
  EXPECT_THROW(profiled_fit(all_machine), ValidationError);
  MixedDesign collinear = d;
  collinear.h = collinear.machine_flag;
  EXPECT_THROW(profiled_fit(collinear), ValidationError);
  MixedDesign one_group = d;
  std::fill(one_group.example.begin(), one_group.example.end(), 0);
  EXPECT_THROW(profiled_fit(one_group), ValidationError);
  EXPECT_THROW(reml_criterion(d, -1.0), ValidationError);
  d.y.pop_back();
  EXPECT_THROW(profiled_fit(d), ValidationError);
}

TEST(Classify, ConfidenceIntervalSides) {
  MixedEffectsFit f;
  f.ci90_lo = 0.1;
  f.ci90_hi = 0.3;
  EXPECT_EQ(classify(f), Significance::positive);
  f.ci90_lo = -0.3;
  f.ci90_hi = -0.1;
  EXPECT_EQ(classify(f), Significance::negative);
  f.ci90_hi = 0.0;
  EXPECT_EQ(classify(f), Significance::neutral);
  EXPECT_EQ(to_string(Significance::neutral), "neutral");
}

Snapshot overrate_board(unsigned seed, bool second_human = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<std::string> ids{"g0", "g1", "g2", "g3", "human1"};
  std::vector<GeneratorKind> kinds(4, GeneratorKind::machine);
  kinds.push_back(GeneratorKind::human);
  if (second_human) {
    ids.push_back("human2");
    kinds.push_back(GeneratorKind::human);
  }
  std::vector<std::vector<double>> h(ids.size(), std::vector<double>(100));
  auto over = h, fair = h;
  for (std::size_t g = 0; g < ids.size(); ++g) {
    const double flag = kinds[g] == GeneratorKind::machine ? 1.0 : 0.0;
    for (std::size_t k = 0; k < 100; ++k) {
      h[g][k] = n01(rng) + (1 - flag);
      over[g][k] = h[g][k] + 1.0 * flag + 0.3 * n01(rng);
      fair[g][k] = h[g][k] + 0.3 * n01(rng);
    }
  }
  Snapshot s = testing::synthetic_snapshot(ids, kinds, h, {"A", "B"});
  testing::add_metric(s, "over", over);
  testing::add_metric(s, "fair", fair);
  return s;
}

TEST(Design, ShapeAndColumns) {
  const Snapshot s = overrate_board(9);
  const MixedDesign d = build_design(s, "over");
  EXPECT_EQ(d.rows(), 500u);
  EXPECT_EQ(*std::max_element(d.example.begin(), d.example.end()), 99);
  EXPECT_EQ(std::count(d.machine_flag.begin(), d.machine_flag.end(), 0.0), 100);
  double mean = 0;
  for (double v : d.y) mean += v;
  EXPECT_NEAR(mean / 500.0, 0.0, 1e-12);
}

TEST(Design, EvaluatedHumanOnly) {
  Snapshot s = overrate_board(10, true);
  EXPECT_EQ(design_generators(s).size(), 6u);
  s.config.mixed_effects = MixedEffectsConfig{"human1", {}};
  const auto gens = design_generators(s);
  EXPECT_EQ(gens.size(), 5u);
  EXPECT_EQ(std::count(gens.begin(), gens.end(), "human2"), 0);
  EXPECT_EQ(build_design(s, "fair").rows(), 500u);
}

TEST(Design, RequiresHumanAndMachine) {
  Snapshot s = overrate_board(11);
  s.generators.erase("human1");
  EXPECT_THROW(build_design(s, "over"), ValidationError);
}

TEST(Design, RestrictedTensorFeedsAnalysis) {
  Snapshot s = overrate_board(12);
  s.config.mixed_effects = MixedEffectsConfig{"human1", {"A"}};
  for (const auto& [gid, col] : s.scores.cells.at("over")) {
    ScoreColumn flipped = col;
    for (auto& c : flipped) c = {-c.raw, -c.oriented};
    s.restricted_scores.cells["over"][gid] = flipped;
  }
  const auto restricted = profiled_fit(build_design(s, "over"));
  EXPECT_LT(restricted.beta0, -0.5);
  s.config.mixed_effects->reference_tags.clear();
  EXPECT_GT(profiled_fit(build_design(s, "over")).beta0, 0.5);
}

TEST(OverrateReport, RowsFailuresAndOrder) {
  Snapshot s = overrate_board(13);
  testing::add_metric(s, "broken", std::vector<std::vector<double>>(5, std::vector<double>(100, 0.0)));
  s.scores.cells["broken"].erase("g1");
  EnsembleModel m;
  m.terms = {{"over", 1.0, 0.0, 1.0}, {"fair", 1.0, 0.0, 1.0}};
  const auto report = overrate_report(s, &m);
  ASSERT_EQ(report.rows.size(), 3u);
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].metric_id, "broken");
  EXPECT_EQ(report.rows[0].metric_id, "fair");
  EXPECT_EQ(report.rows[2].metric_id, "over");
  EXPECT_TRUE(report.rows[1].is_ensemble);
  EXPECT_EQ(report.rows[2].significance, Significance::positive);
  EXPECT_EQ(report.rows[0].significance, Significance::neutral);
  const Json j = to_json(report);
  EXPECT_EQ(j.at("rows").size(), 3u);
  EXPECT_EQ(j.at("rows")[0].at("n_rows"), 500);
  EXPECT_EQ(j.at("reference_tags"), "AB");
}

}  // namespace
}  // namespace billboard
