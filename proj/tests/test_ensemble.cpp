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

#include <random>

#include <gtest/gtest.h>

#include "billboard/ensemble.hpp"
#include "billboard/errors.hpp"
#include "billboard/panel.hpp"
#include "billboard/stats.hpp"
#include "test_util.hpp"

namespace billboard {
namespace {

using Grid = std::vector<std::vector<double>>;

struct Synthetic {
  Grid h, a, b, c, d;
};

Synthetic synthetic_grids(unsigned seed, std::size_t gens = 6, std::size_t k = 30) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Synthetic s;
  s.h.assign(gens, std::vector<double>(k));
  s.a = s.b = s.c = s.d = s.h;
  for (std::size_t g = 0; g < gens; ++g) {
    for (std::size_t i = 0; i < k; ++i) {
      s.h[g][i] = 0.4 * static_cast<double>(g) + n01(rng);
      s.a[g][i] = s.h[g][i] + 0.3 * n01(rng);
      s.b[g][i] = s.h[g][i] + 0.6 * n01(rng);
      s.c[g][i] = 0.5 * s.h[g][i] + n01(rng);
      s.d[g][i] = n01(rng);
    }
  }
  return s;
}

Snapshot board_from(const Synthetic& s, bool with_d = true) {
  std::vector<std::string> ids;
  for (std::size_t g = 0; g < s.h.size(); ++g) ids.push_back("g" + std::to_string(g));
  Snapshot snap = testing::synthetic_snapshot(
      ids, std::vector<GeneratorKind>(ids.size(), GeneratorKind::machine), s.h, {"A", "B"});
  snap.config.board_id = "wmt20-zh-en";
  testing::add_metric(snap, "ma", s.a);
  testing::add_metric(snap, "mb", s.b);
  testing::add_metric(snap, "mc", s.c);
  if (with_d) testing::add_metric(snap, "md", s.d);
  return snap;
}

TEST(EnsembleScore, LinearCombinationOfStandardizedScores) {
  EnsembleModel m;
  m.intercept = 0.5;
  m.terms = {{"x", 2.0, 1.0, 2.0}, {"y", -1.0, 0.0, 1.0}, {"unused", 0.0, 0.0, 1.0}};
  EXPECT_DOUBLE_EQ(ensemble_score(m, {{"x", 3.0}, {"y", 4.0}}), -1.5);
  EXPECT_THROW(ensemble_score(m, {{"x", 3.0}}), NotFoundError);
  EXPECT_EQ(m.selected().size(), 2u);
}

TEST(Signature, Format) {
  EXPECT_EQ(make_signature("wmt20-zh-en", "AB", 1), "ensemble.wmt20-zh-en+refs.AB+version.1");
}

TEST(EnsembleJson, RoundTrip) {
  EnsembleModel m;
  m.signature = make_signature("b", "A", 3);
  m.board_id = "b";
  m.reference_tags = "A";
  m.version = 3;
  m.lambda = 0.125;
  m.intercept = -0.3;
  m.terms = {{"x", 0.7, 0.1, 1.2}, {"y", 0.0, 2.0, 3.0}};
  m.cv_correlation = 0.61;
  m.created_at = "2026-01-01T00:00:00Z";
  m.inexact_support = true;
  const auto back = ensemble_from_json(to_json(m));
  EXPECT_EQ(ensemble_file_content(back), ensemble_file_content(m));
  EXPECT_EQ(to_json(m).at("weights").size(), 2u);
  EXPECT_THROW(ensemble_from_json(Json{{"signature", 1}}), ParseError);
}

TEST(Registry, StoreFindAndCollision) {
  testing::TempDir dir;
  const EnsembleRegistry reg(dir / "ensembles");
  EXPECT_TRUE(reg.list().empty());
  EXPECT_FALSE(reg.latest());
  EnsembleModel m;
  m.board_id = "b";
  m.version = 1;
  m.signature = make_signature("b", "A", 1);
  reg.store(m);
  reg.store(m);
  EXPECT_EQ(reg.find(m.signature).signature, m.signature);
  EnsembleModel v2 = m;
  v2.version = 2;
  v2.signature = make_signature("b", "A", 2);
  reg.store(v2);
  EXPECT_EQ(reg.latest()->version, 2);
  EXPECT_EQ(reg.list().size(), 2u);
  m.intercept = 1.0;
  EXPECT_THROW(reg.store(m), Error);
  EXPECT_THROW(reg.find(make_signature("b", "A", 9)), NotFoundError);
  EXPECT_THROW(reg.find("../etc/passwd"), ValidationError);
  EXPECT_THROW(reg.find(".hidden"), ValidationError);
}

TEST(FitPanel, StandardizersUseTrainingRowsOnly) {
  const Snapshot snap = board_from(synthetic_grids(1));
  const Panel panel = build_panel(snap, {"ma", "mb", "mc", "md"}, correlation_generators(snap));
  std::vector<std::size_t> rows;
  for (std::size_t r = 30; r < panel.rows(); ++r) rows.push_back(r);
  const PanelFit fit = fit_panel(panel, rows, {0, 1, 2, 3}, {});
  std::vector<double> train(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) train[i] = panel.columns[0][rows[i]];
  const auto s = standardize(train);
  EXPECT_DOUBLE_EQ(fit.terms[0].mean, s.mean);
  EXPECT_DOUBLE_EQ(fit.terms[0].std, s.std);
  std::size_t support = 0;
  for (const auto& t : fit.terms) support += t.weight != 0.0;
  EXPECT_EQ(support, 3u);
  EXPECT_FALSE(fit.inexact_support);
}

TEST(FitPanel, ConstantColumnIsDropped) {
  Snapshot snap = board_from(synthetic_grids(2), false);
  testing::add_metric(snap, "flat", Grid(6, std::vector<double>(30, 2.0)));
  const Panel panel = build_panel(snap, {"flat", "ma", "mb", "mc"}, correlation_generators(snap));
  const PanelFit fit = fit_panel(panel, {0, 1, 2, 3, 4, 40, 50, 70}, {0, 1, 2, 3}, {});
  EXPECT_EQ(fit.terms[0].weight, 0.0);
  EXPECT_EQ(fit.terms.size(), 4u);
  const PanelFit two = fit_panel(panel, {0, 1, 2, 3, 4, 40, 50, 70}, {0, 1, 2}, {});
  EXPECT_TRUE(two.inexact_support);
}

TEST(LogoCv, FoldsAndPooledCorrelation) {
  const Snapshot snap = board_from(synthetic_grids(3));
  const CvResult cv = logo_cv(snap);
  ASSERT_EQ(cv.folds.size(), 6u);
  EXPECT_EQ(cv.folds[0].held_out, "g0");
  for (const auto& f : cv.folds) EXPECT_EQ(f.support, 3u);
  EXPECT_NEAR(cv.correlation, pearson(cv.predictions, build_panel(snap, {}, correlation_generators(snap)).human).value, 1e-15);
  EXPECT_GT(cv.correlation, 0.8);
}

TEST(LogoCv, HeldOutGeneratorDoesNotLeak) {
  Synthetic s = synthetic_grids(4);
  const Snapshot base = board_from(s);
  for (auto& v : s.a[2]) v += 100.0;
  for (auto& v : s.h[2]) v -= 50.0;
  const Snapshot changed = board_from(s);
  const CvResult x = logo_cv(base);
  const CvResult y = logo_cv(changed);
  for (std::size_t r = 60; r < 90; ++r) EXPECT_NE(x.predictions[r], y.predictions[r]);
  // fold 2 trains on the unchanged generators, so only its inputs moved
  const Panel p = build_panel(changed, {"ma", "mb", "mc", "md"}, correlation_generators(changed));
  std::vector<std::size_t> train;
  for (std::size_t r = 0; r < p.rows(); ++r) if (p.group[r] != 2) train.push_back(r);
  const PanelFit fit = fit_panel(p, train, {0, 1, 2, 3}, {});
  for (std::size_t r = 60; r < 90; ++r) EXPECT_DOUBLE_EQ(y.predictions[r], fit.predict(p, r));
}

TEST(LogoCv, NeedsThreeGenerators) {
  const Snapshot snap = board_from(synthetic_grids(5, 2));
  EXPECT_THROW(logo_cv(snap), ValidationError);
}

TEST(BuildEnsemble, PerfectMetricCrossValidatesNearOne) {
  Synthetic s = synthetic_grids(6);
  s.a = s.h;
  const Snapshot snap = board_from(s);
  testing::TempDir dir;
  const auto m = build_ensemble(snap, EnsembleRegistry(dir / "e"));
  EXPECT_GT(m.cv_correlation, 0.999);
  EXPECT_EQ(m.selected().size(), 3u);
  EXPECT_EQ(m.terms.size(), 4u);
}

TEST(BuildEnsemble, FewerThanThreeMetrics) {
  Snapshot snap = board_from(synthetic_grids(7), false);
  snap.metrics.erase("mc");
  testing::TempDir dir;
  try {
    build_ensemble(snap, EnsembleRegistry(dir / "e"));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "fewer than 3 metrics");
  }
}

TEST(BuildEnsemble, DeterministicAndVersioned) {
  const Snapshot snap = board_from(synthetic_grids(8));
  testing::TempDir d1, d2;
  const EnsembleRegistry r1(d1 / "e"), r2(d2 / "e");
  const auto a = build_ensemble(snap, r1);
  const auto b = build_ensemble(snap, r2);
  EXPECT_EQ(a.signature, "ensemble.wmt20-zh-en+refs.AB+version.1");
  EXPECT_EQ(ensemble_file_content(a), ensemble_file_content(b));
  EXPECT_EQ(build_ensemble(snap, r1).signature, a.signature);
  EXPECT_EQ(r1.list().size(), 1u);

  Snapshot more = snap;
  testing::add_metric(more, "me", synthetic_grids(9).b);
  const auto c = build_ensemble(more, r1);
  EXPECT_EQ(c.version, 2);
  EXPECT_EQ(c.signature, "ensemble.wmt20-zh-en+refs.AB+version.2");
  EXPECT_EQ(r1.find(a.signature).version, 1);
}

TEST(Ablation, DropsMatchRefits) {
  const Snapshot snap = board_from(synthetic_grids(10));
  testing::TempDir dir;
  const auto m = build_ensemble(snap, EnsembleRegistry(dir / "e"));
  const auto ablation = ablate_ensemble(snap, m);
  ASSERT_EQ(ablation.size(), 4u);
  const Panel panel = build_panel(snap, {"ma", "mb", "mc", "md"}, correlation_generators(snap));
  FitPolicy ols;
  ols.tune = false;
  auto selected = m.selected();
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& e = ablation[i];
    std::vector<std::size_t> cols;
    for (const auto& t : selected) {
      if (t.metric_id != e.removed_metric_id) cols.push_back(panel.column_index(t.metric_id));
    }
    const double cv = logo_cv(panel, cols, ols).correlation;
    EXPECT_DOUBLE_EQ(e.cv_correlation, cv);
    EXPECT_DOUBLE_EQ(e.drop, m.cv_correlation - cv);
  }
  EXPECT_GE(std::abs(std::find_if(m.terms.begin(), m.terms.end(), [&](const auto& t) {
                       return t.metric_id == ablation[0].removed_metric_id;
                     })->weight),
            std::abs(std::find_if(m.terms.begin(), m.terms.end(), [&](const auto& t) {
                       return t.metric_id == ablation[1].removed_metric_id;
                     })->weight));
  EXPECT_EQ(ablation[3].drop, 0.0);
  EXPECT_EQ(ablation[3].cv_correlation, m.cv_correlation);
  EXPECT_EQ(to_json(ablation).size(), 4u);
}

TEST(Ablation, NeedsTwoSelectedTerms) {
  const Snapshot snap = board_from(synthetic_grids(11));
  EnsembleModel m;
  m.terms = {{"ma", 1.0, 0.0, 1.0}, {"mb", 0.0, 0.0, 1.0}};
  EXPECT_THROW(ablate_ensemble(snap, m), ValidationError);
}

}  // namespace
}  // namespace billboard
