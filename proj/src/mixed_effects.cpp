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

#include "billboard/mixed_effects.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "billboard/ensemble.hpp"
#include "billboard/errors.hpp"
#include "billboard/stats.hpp"

namespace billboard {
namespace {

constexpr int kFixedEffects = 3;
constexpr double kLogRhoLo = -8.0;
constexpr double kLogRhoHi = 8.0;
constexpr double kGoldenTolerance = 1e-9;

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Per-group sums of the columns (1, flag, h) and y.
struct BlockSums {
  std::vector<double> n;
  std::vector<Vec3> sx;
  std::vector<double> sy;
  Mat3 xtx = Mat3::Zero();
  Vec3 xty = Vec3::Zero();

  explicit BlockSums(const MixedDesign& d) {
    const int groups = d.example.empty() ? 0 : *std::max_element(d.example.begin(), d.example.end()) + 1;
    n.assign(groups, 0.0);
    sx.assign(groups, Vec3::Zero());
    sy.assign(groups, 0.0);
    for (std::size_t i = 0; i < d.rows(); ++i) {
      const Vec3 x(1.0, d.machine_flag[i], d.h[i]);
      const int g = d.example[i];
      n[g] += 1.0;
      sx[g] += x;
      sy[g] += d.y[i];
      xtx += x * x.transpose();
      xty += x * d.y[i];
    }
  }
};

struct GlsState {
  Mat3 a;
  Vec3 beta;
  double rwr = 0.0;
  double log_det_v = 0.0;
};

GlsState gls(const MixedDesign& d, const BlockSums& s, double rho) {
  GlsState st;
  st.a = s.xtx;
  Vec3 b = s.xty;
  for (std::size_t g = 0; g < s.n.size(); ++g) {
    if (s.n[g] == 0.0) continue;
    const double c = rho / (1.0 + rho * s.n[g]);
    st.a -= c * s.sx[g] * s.sx[g].transpose();
    b -= c * s.sx[g] * s.sy[g];
    st.log_det_v += std::log1p(rho * s.n[g]);
  }
  const Eigen::LDLT<Mat3> ldlt(st.a);
  st.beta = ldlt.solve(b);
  std::vector<double> group_resid(s.n.size(), 0.0);
  double rr = 0.0;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const double r =
        d.y[i] - st.beta[0] - st.beta[1] * d.machine_flag[i] - st.beta[2] * d.h[i];
    rr += r * r;
    group_resid[d.example[i]] += r;
  }
  for (std::size_t g = 0; g < s.n.size(); ++g) {
    if (s.n[g] == 0.0) continue;
    rr -= rho / (1.0 + rho * s.n[g]) * group_resid[g] * group_resid[g];
  }
  st.rwr = std::max(rr, std::numeric_limits<double>::min());
  return st;
}

double criterion_from(const GlsState& st, std::size_t n_rows) {
  const double dof = static_cast<double>(n_rows) - kFixedEffects;
  const double sigma2 = st.rwr / dof;
  const double log_det_a = std::log(st.a.determinant());
  return dof * (1.0 + std::log(2.0 * std::numbers::pi * sigma2)) + st.log_det_v + log_det_a;
}

void check_full_rank(const BlockSums& s) {
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(s.xtx);
  const auto ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 1e-10 * ev.maxCoeff())) {
    throw ValidationError(
        "singular fixed-effects design (machine flag or human score is constant or collinear)");
  }
}

MixedEffectsFit finish(const MixedDesign& d, const BlockSums& s, double rho) {
  const GlsState st = gls(d, s, rho);
  MixedEffectsFit fit;
  fit.intercept = st.beta[0];
  fit.beta0 = st.beta[1];
  fit.beta1 = st.beta[2];
  fit.rho = rho;
  fit.n_rows = static_cast<long>(d.rows());
  fit.sigma_eps_sq = st.rwr / (static_cast<double>(d.rows()) - kFixedEffects);
  fit.sigma_gamma_sq = rho * fit.sigma_eps_sq;
  const Mat3 cov = fit.sigma_eps_sq * st.a.inverse();
  fit.se_beta0 = std::sqrt(cov(1, 1));
  fit.ci90_lo = fit.beta0 - kNormalQuantile95 * fit.se_beta0;
  fit.ci90_hi = fit.beta0 + kNormalQuantile95 * fit.se_beta0;
  fit.reml_deviance = criterion_from(st, d.rows());
  if (!std::isfinite(fit.reml_deviance) || !std::isfinite(fit.se_beta0)) {
    throw NumericalError("non-finite REML fit for '" + d.metric_id + "'");
  }
  return fit;
}

}  // namespace

void MixedDesign::validate() const {
  const std::size_t n = y.size();
  if (machine_flag.size() != n || h.size() != n || example.size() != n) {
    throw ValidationError("mixed design columns differ in length");
  }
  if (n <= static_cast<std::size_t>(kFixedEffects)) {
    throw ValidationError("mixed design needs more rows than fixed effects");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i]) || !std::isfinite(h[i]) || !std::isfinite(machine_flag[i])) {
      throw ValidationError("mixed design contains non-finite values");
    }
    if (example[i] < 0) throw ValidationError("mixed design has a negative group index");
  }
  std::vector<int> groups(example);
  std::sort(groups.begin(), groups.end());
  if (std::unique(groups.begin(), groups.end()) - groups.begin() < 2) {
    throw ValidationError("mixed design needs at least 2 example groups");
  }
}

double reml_criterion(const MixedDesign& design, double rho) {
  if (!(rho >= 0.0)) throw ValidationError("variance ratio must be >= 0");
  design.validate();
  const BlockSums s(design);
  return criterion_from(gls(design, s, rho), design.rows());
}

MixedEffectsFit fit_at_ratio(const MixedDesign& design, double rho) {
  if (!(rho >= 0.0)) throw ValidationError("variance ratio must be >= 0");
  design.validate();
  const BlockSums s(design);
  check_full_rank(s);
  return finish(design, s, rho);
}

MixedEffectsFit profiled_fit(const MixedDesign& design) {
  design.validate();
  const BlockSums s(design);
  check_full_rank(s);
  const auto f = [&](double t) {
    const double value = criterion_from(gls(design, s, std::pow(10.0, t)), design.rows());
    if (!std::isfinite(value)) {
      throw NumericalError("non-finite REML criterion for '" + design.metric_id + "'");
    }
    return value;
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = kLogRhoLo;
  double b = kLogRhoHi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > kGoldenTolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double t_best = 0.5 * (a + b);
  const double f_best = f(t_best);
  const double f_zero = criterion_from(gls(design, s, 0.0), design.rows());
  if (!std::isfinite(f_zero)) {
    throw NumericalError("non-finite REML criterion for '" + design.metric_id + "'");
  }
  return finish(design, s, f_zero <= f_best ? 0.0 : std::pow(10.0, t_best));
}

std::vector<std::string> design_generators(const Snapshot& snapshot) {
  std::vector<std::string> out;
  const auto& me = snapshot.config.mixed_effects;
  for (const auto& id : snapshot.annotated_generator_ids()) {
    const auto& g = snapshot.generators.at(id);
    if (me && g.kind == GeneratorKind::human && id != me->evaluated_human) continue;
    out.push_back(id);
  }
  return out;
}

namespace {

using ScoreFn = std::function<double(const std::string& generator_id, std::size_t k)>;

MixedDesign design_from(const Snapshot& snapshot, const std::string& id, const ScoreFn& score) {
  const auto generators = design_generators(snapshot);
  bool has_human = false;
  bool has_machine = false;
  for (const auto& g : generators) {
    (snapshot.generators.at(g).kind == GeneratorKind::human ? has_human : has_machine) = true;
  }
  if (!has_human) {
    throw ValidationError("no human-kind annotated generator: the overrating coefficient is unidentifiable");
  }
  if (!has_machine) throw ValidationError("no machine-kind annotated generator");
  MixedDesign d;
  d.metric_id = id;
  std::vector<double> raw;
  for (const auto& g : generators) {
    const double flag = snapshot.generators.at(g).kind == GeneratorKind::machine ? 1.0 : 0.0;
    for (std::size_t k = 0; k < snapshot.testset.size(); ++k) {
      raw.push_back(score(g, k));
      d.machine_flag.push_back(flag);
      d.h.push_back(snapshot.judgments.score(g, snapshot.testset.at(k).instance_id));
      d.example.push_back(static_cast<int>(k));
    }
  }
  d.y = standardize(raw).z;
  return d;
}

}  // namespace

MixedDesign build_design(const Snapshot& snapshot, const std::string& metric_id) {
  return design_from(snapshot, metric_id, [&](const std::string& g, std::size_t k) {
    return snapshot.analysis_column(metric_id, g).at(k).oriented;
  });
}

MixedDesign build_design(const Snapshot& snapshot, const EnsembleModel& ensemble) {
  const auto selected = ensemble.selected();
  return design_from(snapshot, "ensemble", [&](const std::string& g, std::size_t k) {
    std::map<std::string, double> row;
    for (const auto& t : selected) {
      row[t.metric_id] = snapshot.analysis_column(t.metric_id, g).at(k).oriented;
    }
    return ensemble_score(ensemble, row);
  });
}

std::string_view to_string(Significance s) {
  switch (s) {
    case Significance::positive: return "positive";
    case Significance::negative: return "negative";
    case Significance::neutral: return "neutral";
  }
  return "neutral";
}

Significance classify(const MixedEffectsFit& fit) {
  if (fit.ci90_lo > 0.0) return Significance::positive;
  if (fit.ci90_hi < 0.0) return Significance::negative;
  return Significance::neutral;
}

OverrateReport overrate_report(const Snapshot& snapshot, const EnsembleModel* ensemble) {
  OverrateReport report;
  if (const auto& me = snapshot.config.mixed_effects) {
    report.evaluated_human = me->evaluated_human;
    report.reference_tags = join_tags(me->reference_tags);
  } else {
    report.reference_tags = join_tags(snapshot.scoring_tags());
  }
  const auto attempt = [&](const std::string& id, bool is_ensemble, const auto& make) {
    try {
      const MixedEffectsFit fit = profiled_fit(make());
      report.rows.push_back({id, is_ensemble, fit, classify(fit)});
    } catch (const Error& e) {
      report.failures.push_back({id, e.what()});
    } catch (const std::out_of_range& e) {
      report.failures.push_back({id, "missing scores"});
    }
  };
  for (const auto& m : snapshot.active_metric_ids()) {
    attempt(m, false, [&] { return build_design(snapshot, m); });
  }
  if (ensemble != nullptr) {
    attempt("ensemble", true, [&] { return build_design(snapshot, *ensemble); });
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const auto& a, const auto& b) {
    return a.fit.beta0 != b.fit.beta0 ? a.fit.beta0 < b.fit.beta0 : a.metric_id < b.metric_id;
  });
  return report;
}

Json to_json(const OverrateReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"metric_id", r.metric_id},
                    {"is_ensemble", r.is_ensemble},
                    {"beta0", r.fit.beta0},
                    {"beta1", r.fit.beta1},
                    {"se", r.fit.se_beta0},
                    {"ci90_lo", r.fit.ci90_lo},
                    {"ci90_hi", r.fit.ci90_hi},
                    {"sigma_gamma_sq", r.fit.sigma_gamma_sq},
                    {"sigma_eps_sq", r.fit.sigma_eps_sq},
                    {"n_rows", r.fit.n_rows},
                    {"significance", std::string(to_string(r.significance))}});
  }
  Json failures = Json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"metric_id", f.metric_id}, {"error", f.error}});
  }
  return {{"rows", std::move(rows)},
          {"failures", std::move(failures)},
          {"evaluated_human", report.evaluated_human},
          {"reference_tags", report.reference_tags},
          {"ensemble_scores", "full-fit"}};
}

}  // namespace billboard
