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

#include "billboard/ensemble.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <numeric>

#include "billboard/errors.hpp"
#include "billboard/kernels.hpp"
#include "billboard/stats.hpp"

namespace billboard {
namespace {

constexpr std::size_t kMinEnsembleInputs = 3;

void validate_signature(const std::string& signature) {
  const bool ok = !signature.empty() && signature.front() != '.' &&
                  std::all_of(signature.begin(), signature.end(), [](unsigned char c) {
                    return std::isalnum(c) || c == '.' || c == '_' || c == '-' || c == '+';
                  });
  if (!ok) throw ValidationError("invalid ensemble signature '" + signature + "'");
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

Json content_key(const EnsembleModel& model) {
  Json j = to_json(model);
  j.erase("signature");
  j.erase("version");
  j.erase("created_at");
  return j;
}

}  // namespace

std::vector<EnsembleTerm> EnsembleModel::selected() const {
  std::vector<EnsembleTerm> out;
  for (const auto& t : terms) {
    if (t.weight != 0.0) out.push_back(t);
  }
  return out;
}

double ensemble_score(const EnsembleModel& model,
                      const std::map<std::string, double>& metric_scores) {
  double total = model.intercept;
  for (const auto& t : model.terms) {
    if (t.weight == 0.0) continue;
    const auto it = metric_scores.find(t.metric_id);
    if (it == metric_scores.end()) {
      throw NotFoundError("ensemble_score: missing score for metric '" + t.metric_id + "'");
    }
    total += t.weight * (it->second - t.mean) / t.std;
  }
  return total;
}

std::string make_signature(const std::string& board_id, const std::string& reference_tags,
                           long version) {
  return "ensemble." + board_id + "+refs." + reference_tags + "+version." +
         std::to_string(version);
}

Json to_json(const EnsembleModel& model) {
  Json weights = Json::array();
  for (const auto& t : model.terms) {
    weights.push_back({{"metric_id", t.metric_id}, {"weight", t.weight}, {"mean", t.mean},
                       {"std", t.std}});
  }
  return {{"signature", model.signature},
          {"board_id", model.board_id},
          {"reference_tags", model.reference_tags},
          {"version", model.version},
          {"lambda", model.lambda},
          {"intercept", model.intercept},
          {"weights", std::move(weights)},
          {"cv_correlation", model.cv_correlation},
          {"created_at", model.created_at},
          {"inexact_support", model.inexact_support}};
}

EnsembleModel ensemble_from_json(const Json& j) {
  try {
    EnsembleModel m;
    m.signature = j.at("signature").get<std::string>();
    m.board_id = j.at("board_id").get<std::string>();
    m.reference_tags = j.value("reference_tags", std::string{});
    m.version = j.at("version").get<long>();
    m.lambda = j.at("lambda").get<double>();
    m.intercept = j.at("intercept").get<double>();
    for (const auto& w : j.at("weights")) {
      m.terms.push_back({w.at("metric_id").get<std::string>(), w.at("weight").get<double>(),
                         w.at("mean").get<double>(), w.at("std").get<double>()});
    }
    m.cv_correlation = j.at("cv_correlation").get<double>();
    m.created_at = j.value("created_at", std::string{});
    m.inexact_support = j.value("inexact_support", false);
    return m;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("invalid ensemble record: ") + e.what());
  }
}

std::string ensemble_file_content(const EnsembleModel& model) {
  return to_json(model).dump(2) + "\n";
}

double PanelFit::predict(const Panel& panel, std::size_t row) const {
  double total = intercept;
  for (const auto& t : terms) {
    if (t.weight == 0.0) continue;
    total += t.weight * (panel.columns[panel.column_index(t.metric_id)][row] - t.mean) / t.std;
  }
  return total;
}

PanelFit fit_panel(const Panel& panel, const std::vector<std::size_t>& rows,
                   const std::vector<std::size_t>& cols, const FitPolicy& policy) {
  if (rows.size() < 2) throw ValidationError("ensemble fit needs at least 2 rows");
  PanelFit out;
  std::vector<std::vector<double>> design;
  std::vector<std::size_t> usable;  // index into out.terms
  std::vector<double> values(rows.size());
  for (std::size_t c : cols) {
    for (std::size_t r = 0; r < rows.size(); ++r) values[r] = panel.columns[c][rows[r]];
    EnsembleTerm term{panel.metric_ids[c], 0.0, kernels::mean(values), 0.0};
    try {
      Standardized s = standardize(values);
      term.mean = s.mean;
      term.std = s.std;
      design.push_back(std::move(s.z));
      usable.push_back(out.terms.size());
    } catch (const DegenerateError&) {
      // constant on these rows: cannot enter the fit
    }
    out.terms.push_back(std::move(term));
  }
  std::vector<double> target(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) target[r] = panel.human[rows[r]];

  if (usable.empty()) {
    out.intercept = kernels::mean(target);
    out.inexact_support = policy.tune && policy.target_support > 0;
    return out;
  }
  std::vector<std::string> ids;
  for (std::size_t u : usable) ids.push_back(out.terms[u].metric_id);
  const RegressionProblem problem =
      RegressionProblem::from_columns(design, std::move(target), std::move(ids));

  LassoFit fit;
  if (policy.tune) {
    const std::size_t target_support = std::min(policy.target_support, usable.size());
    LambdaTuning tuned = tune_lambda(problem, target_support);
    fit = std::move(tuned.fit);
    out.lambda = tuned.lambda;
    out.inexact_support = tuned.inexact_support || target_support < policy.target_support;
  } else {
    fit = lasso_fit(problem, policy.lambda);
    out.lambda = policy.lambda;
  }
  for (std::size_t i = 0; i < usable.size(); ++i) out.terms[usable[i]].weight = fit.weights[i];
  out.intercept = fit.intercept;
  return out;
}

CvResult logo_cv(const Panel& panel, const std::vector<std::size_t>& cols,
                 const FitPolicy& policy) {
  const std::size_t n_gen = panel.generator_ids.size();
  if (n_gen < 3) {
    throw ValidationError("cross validation needs at least 3 annotated generators, have " +
                          std::to_string(n_gen));
  }
  CvResult out;
  out.predictions.assign(panel.rows(), 0.0);
  for (std::size_t g = 0; g < n_gen; ++g) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> held;
    for (std::size_t r = 0; r < panel.rows(); ++r) {
      (static_cast<std::size_t>(panel.group[r]) == g ? held : train).push_back(r);
    }
    const PanelFit fit = fit_panel(panel, train, cols, policy);
    for (std::size_t r : held) out.predictions[r] = fit.predict(panel, r);
    std::size_t support = 0;
    for (const auto& t : fit.terms) support += t.weight != 0.0 ? 1 : 0;
    out.folds.push_back({panel.generator_ids[g], fit.lambda, support, fit.inexact_support});
  }
  const Correlation c = pearson(out.predictions, panel.human);
  out.correlation = c.value;
  out.degenerate = c.degenerate;
  return out;
}

std::vector<std::string> ensemble_inputs(const Snapshot& snapshot) {
  std::vector<std::string> out;
  const auto generators = correlation_generators(snapshot);
  if (generators.empty()) return out;
  for (const auto& m : snapshot.active_metric_ids()) {
    const bool complete = std::all_of(generators.begin(), generators.end(),
                                      [&](const auto& g) { return snapshot.scores.has(m, g); });
    if (!complete) continue;
    const Panel p = build_panel(snapshot, {m}, generators);
    const auto& col = p.columns.front();
    if (std::adjacent_find(col.begin(), col.end(), std::not_equal_to<>()) != col.end()) {
      out.push_back(m);
    }
  }
  return out;
}

CvResult logo_cv(const Snapshot& snapshot) {
  const Panel panel = build_panel(snapshot, ensemble_inputs(snapshot),
                                  correlation_generators(snapshot));
  return logo_cv(panel, all_indices(panel.metric_ids.size()));
}

EnsembleModel fit_ensemble(const Panel& panel, const FitPolicy& policy) {
  const auto cols = all_indices(panel.metric_ids.size());
  const PanelFit fit = fit_panel(panel, all_indices(panel.rows()), cols, policy);
  EnsembleModel model;
  model.terms = fit.terms;
  model.intercept = fit.intercept;
  model.lambda = fit.lambda;
  model.inexact_support = fit.inexact_support;
  model.cv_correlation = logo_cv(panel, cols, policy).correlation;
  return model;
}

EnsembleRegistry::EnsembleRegistry(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::vector<EnsembleModel> EnsembleRegistry::list() const {
  std::vector<EnsembleModel> out;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir_, ec)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.path().extension() != ".json") continue;
    try {
      out.push_back(ensemble_from_json(Json::parse(read_file(entry.path()))));
    } catch (const Json::exception& e) {
      throw ParseError(entry.path().string() + ": " + e.what());
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.version != b.version ? a.version < b.version : a.signature < b.signature;
  });
  return out;
}

std::optional<EnsembleModel> EnsembleRegistry::latest() const {
  auto all = list();
  if (all.empty()) return std::nullopt;
  return all.back();
}

EnsembleModel EnsembleRegistry::find(const std::string& signature) const {
  validate_signature(signature);
  const auto path = dir_ / (signature + ".json");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw NotFoundError("no ensemble with signature '" + signature + "'");
  }
  return ensemble_from_json(Json::parse(read_file(path)));
}

void EnsembleRegistry::store(const EnsembleModel& model) const {
  validate_signature(model.signature);
  const auto path = dir_ / (model.signature + ".json");
  const std::string content = ensemble_file_content(model);
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    if (read_file(path) == content) return;
    throw Error("signature collision: '" + model.signature +
                "' is already registered with different content");
  }
  std::filesystem::create_directories(dir_);
  write_file_atomic(path, content);
}

EnsembleModel build_ensemble(const Snapshot& snapshot, const EnsembleRegistry& registry) {
  if (snapshot.judgments.empty()) throw ValidationError("no human judgments");
  const auto inputs = ensemble_inputs(snapshot);
  if (inputs.size() < kMinEnsembleInputs) {
    throw ValidationError("fewer than 3 metrics");
  }
  const Panel panel = build_panel(snapshot, inputs, correlation_generators(snapshot));
  EnsembleModel model = fit_ensemble(panel);
  model.board_id = snapshot.config.board_id;
  model.reference_tags = join_tags(snapshot.scoring_tags());
  model.created_at = snapshot.latest_submission_time();

  const auto latest = registry.latest();
  if (latest && content_key(*latest) == content_key(model)) return *latest;
  model.version = latest ? latest->version + 1 : 1;
  model.signature = make_signature(model.board_id, model.reference_tags, model.version);
  registry.store(model);
  return model;
}

std::vector<AblationEntry> ablate_ensemble(const Panel& panel, const EnsembleModel& model) {
  auto selected = model.selected();
  if (selected.size() < 2) {
    throw ValidationError("ablation needs at least 2 selected metrics");
  }
  std::stable_sort(selected.begin(), selected.end(), [](const auto& a, const auto& b) {
    return std::abs(a.weight) > std::abs(b.weight);
  });
  FitPolicy ols;
  ols.tune = false;
  ols.lambda = 0.0;
  std::vector<AblationEntry> out;
  for (const auto& removed : selected) {
    std::vector<std::size_t> cols;
    for (const auto& t : selected) {
      if (t.metric_id != removed.metric_id) cols.push_back(panel.column_index(t.metric_id));
    }
    const double cv = logo_cv(panel, cols, ols).correlation;
    out.push_back({removed.metric_id, cv, model.cv_correlation - cv});
  }
  for (const auto& t : model.terms) {
    if (t.weight == 0.0) out.push_back({t.metric_id, model.cv_correlation, 0.0});
  }
  return out;
}

std::vector<AblationEntry> ablate_ensemble(const Snapshot& snapshot, const EnsembleModel& model) {
  std::vector<std::string> ids;
  for (const auto& t : model.terms) ids.push_back(t.metric_id);
  const Panel panel = build_panel(snapshot, ids, correlation_generators(snapshot));
  return ablate_ensemble(panel, model);
}

Json to_json(const std::vector<AblationEntry>& ablation) {
  Json rows = Json::array();
  for (const auto& a : ablation) {
    rows.push_back({{"removed_metric_id", a.removed_metric_id},
                    {"cv_correlation", a.cv_correlation},
                    {"drop", a.drop}});
  }
  return rows;
}

}  // namespace billboard
