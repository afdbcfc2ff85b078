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

#include <optional>
#include <string>
#include <vector>

#include "billboard/datastore.hpp"

namespace billboard {

struct EnsembleModel;

/// Rows of the random-intercept model
///   y = intercept + beta0 * machine_flag + beta1 * h + gamma_example + eps.
struct MixedDesign {
  std::string metric_id;
  std::vector<double> y;
  std::vector<double> machine_flag;
  std::vector<double> h;
  std::vector<int> example;  // group index, 0-based

  std::size_t rows() const noexcept { return y.size(); }
  void validate() const;
};

struct MixedEffectsFit {
  double intercept = 0.0;
  double beta0 = 0.0;
  double beta1 = 0.0;
  double se_beta0 = 0.0;
  double ci90_lo = 0.0;
  double ci90_hi = 0.0;
  double sigma_gamma_sq = 0.0;
  double sigma_eps_sq = 0.0;
  double rho = 0.0;  // sigma_gamma_sq / sigma_eps_sq
  double reml_deviance = 0.0;
  long n_rows = 0;
};

inline constexpr double kNormalQuantile95 = 1.6449;

/// -2 x restricted log-likelihood with sigma_eps^2 profiled out, at variance
/// ratio rho = sigma_gamma^2 / sigma_eps^2 >= 0.
double reml_criterion(const MixedDesign& design, double rho);

/// GLS fit with the variance ratio held at `rho`.
MixedEffectsFit fit_at_ratio(const MixedDesign& design, double rho);

/// REML fit: golden-section on log10(rho) in [-8, 8] plus the rho = 0
/// boundary. Throws ValidationError for a singular fixed-effects design and
/// NumericalError for a non-finite criterion.
MixedEffectsFit profiled_fit(const MixedDesign& design);

/// Generators entering the overrating analysis: every judged generator, minus
/// human ones other than the evaluated human when reference freeing is set up.
std::vector<std::string> design_generators(const Snapshot& snapshot);

/// Design for one metric with y standardized over all rows.
MixedDesign build_design(const Snapshot& snapshot, const std::string& metric_id);
/// Design whose y is the ensemble's full-fit score.
MixedDesign build_design(const Snapshot& snapshot, const EnsembleModel& ensemble);

enum class Significance { positive, negative, neutral };
std::string_view to_string(Significance s);

struct OverrateRow {
  std::string metric_id;
  bool is_ensemble = false;
  MixedEffectsFit fit;
  Significance significance = Significance::neutral;
};

struct OverrateFailure {
  std::string metric_id;
  std::string error;
};

struct OverrateReport {
  std::vector<OverrateRow> rows;  // by beta0 ascending
  std::vector<OverrateFailure> failures;
  std::string evaluated_human;
  std::string reference_tags;
};

Significance classify(const MixedEffectsFit& fit);

/// One fit per active metric plus the ensemble when given. Per-metric
/// failures are reported as failure entries.
OverrateReport overrate_report(const Snapshot& snapshot, const EnsembleModel* ensemble);

Json to_json(const OverrateReport& report);

}  // namespace billboard
