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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "billboard/datastore.hpp"
#include "billboard/lasso.hpp"
#include "billboard/panel.hpp"

namespace billboard {

/// One input metric of an ensemble with its standardizer. Zero-weight terms
/// record metrics that were offered to the fit but not selected.
struct EnsembleTerm {
  std::string metric_id;
  double weight = 0.0;
  double mean = 0.0;
  double std = 1.0;
};

struct EnsembleModel {
  std::string signature;
  std::string board_id;
  std::string reference_tags;  // concatenated, e.g. "AB"
  long version = 0;
  double lambda = 0.0;
  double intercept = 0.0;
  std::vector<EnsembleTerm> terms;
  double cv_correlation = 0.0;
  std::string created_at;
  bool inexact_support = false;

  /// Terms with a nonzero weight.
  std::vector<EnsembleTerm> selected() const;
};

/// intercept + sum_j w_j (s_j - mean_j) / std_j over the selected terms.
/// `metric_scores` holds oriented, unstandardized scores.
double ensemble_score(const EnsembleModel& model, const std::map<std::string, double>& metric_scores);

/// "ensemble.<board_id>+refs.<tags>+version.<version>".
std::string make_signature(const std::string& board_id, const std::string& reference_tags,
                           long version);

Json to_json(const EnsembleModel& model);
EnsembleModel ensemble_from_json(const Json& j);
/// File bytes for ensembles/<signature>.json.
std::string ensemble_file_content(const EnsembleModel& model);

/// How a panel is fitted: tuned to a support size, or at a fixed lambda.
struct FitPolicy {
  bool tune = true;
  std::size_t target_support = 3;
  double lambda = 0.0;
};

/// A fit on a subset of panel rows, with standardizers from those rows.
struct PanelFit {
  std::vector<EnsembleTerm> terms;
  double intercept = 0.0;
  double lambda = 0.0;
  bool inexact_support = false;

  double predict(const Panel& panel, std::size_t row) const;
};

/// Fits metric columns `cols` on panel rows `rows`. Columns constant on those
/// rows are dropped (weight 0).
PanelFit fit_panel(const Panel& panel, const std::vector<std::size_t>& rows,
                   const std::vector<std::size_t>& cols, const FitPolicy& policy);

struct FoldResult {
  std::string held_out;
  double lambda = 0.0;
  std::size_t support = 0;
  bool inexact_support = false;
};

struct CvResult {
  double correlation = 0.0;
  bool degenerate = false;
  std::vector<FoldResult> folds;
  std::vector<double> predictions;  // held-out prediction per panel row
};

/// Leave-one-generator-out cross validation. Each fold refits standardizers
/// and lambda on the other generators; held-out predictions are pooled into
/// one Pearson correlation against the human scores.
CvResult logo_cv(const Panel& panel, const std::vector<std::size_t>& cols,
                 const FitPolicy& policy = {});
CvResult logo_cv(const Snapshot& snapshot);

/// Active metrics with nonzero variance on the correlation panel.
std::vector<std::string> ensemble_inputs(const Snapshot& snapshot);

/// Full-sample tuned fit plus LOGO-CV, without signature or version.
EnsembleModel fit_ensemble(const Panel& panel, const FitPolicy& policy = {});

/// Stored ensembles of one board, keyed by signature.
class EnsembleRegistry {
 public:
  explicit EnsembleRegistry(std::filesystem::path dir);

  /// All stored models, by ascending version.
  std::vector<EnsembleModel> list() const;
  std::optional<EnsembleModel> latest() const;
  /// Throws NotFoundError.
  EnsembleModel find(const std::string& signature) const;
  /// Writes ensembles/<signature>.json. Storing different content under an
  /// existing signature is an Error.
  void store(const EnsembleModel& model) const;

 private:
  std::filesystem::path dir_;
};

/// Fits the ensemble on the full annotated panel and registers it. When the
/// latest registered model has the same content it is returned unchanged;
/// otherwise the new model gets the next version.
EnsembleModel build_ensemble(const Snapshot& snapshot, const EnsembleRegistry& registry);

struct AblationEntry {
  std::string removed_metric_id;
  double cv_correlation = 0.0;
  double drop = 0.0;  // model.cv_correlation - cv_correlation
};

/// Drops one term at a time and reports the LOGO-CV correlation of a lambda=0
/// refit on the remaining selected terms. Removing a zero-weight term leaves
/// the model unchanged.
std::vector<AblationEntry> ablate_ensemble(const Panel& panel, const EnsembleModel& model);
std::vector<AblationEntry> ablate_ensemble(const Snapshot& snapshot, const EnsembleModel& model);

Json to_json(const std::vector<AblationEntry>& ablation);

}  // namespace billboard
