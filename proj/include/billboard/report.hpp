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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "billboard/ensemble.hpp"
#include "billboard/mixed_effects.hpp"
#include "billboard/stats.hpp"

namespace billboard {

/// Everything the report pages show, taken from one snapshot.
struct Artifacts {
  std::string board_id;
  long board_version = 0;
  std::map<std::string, GeneratorKind> generators;
  std::map<std::string, Direction> metric_directions;
  std::map<std::string, std::string> rejected_metrics;  // id -> diagnostic

  std::vector<MetricRankingEntry> metric_ranking;
  std::string metric_ranking_note;  // why the ranking is absent
  std::optional<GeneratorRanking> generator_ranking;

  std::optional<EnsembleModel> ensemble;
  std::string ensemble_note;
  std::vector<AblationEntry> ablation;

  std::optional<OverrateReport> overrate;
  std::string overrate_note;
};

/// Artifacts carrying only the board's inventory (no analyses).
Artifacts inventory(const Snapshot& snapshot);

enum class ReportKind { generators, metrics, ensemble, overrate };
enum class ReportFormat { json, html, tsv };

ReportKind parse_report_kind(std::string_view s);
ReportFormat parse_report_format(std::string_view s);
std::string_view to_string(ReportKind kind);
std::string_view extension(ReportFormat format);

Json report_json(const Artifacts& artifacts, ReportKind kind);
std::string render(const Artifacts& artifacts, ReportKind kind, ReportFormat format);
std::string render_index(const Artifacts& artifacts);

/// "1.72·COMET-QE+1.48·COMET+1.21·BLEURT": selected terms by descending |weight|.
std::string ensemble_formula(const EnsembleModel& model, int decimals = 2);

/// Every report file keyed by its path under reports/.
std::map<std::string, std::string> render_reports(const Artifacts& artifacts);

}  // namespace billboard
