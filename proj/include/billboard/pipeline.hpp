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

#include <string>
#include <vector>

#include "billboard/datastore.hpp"
#include "billboard/report.hpp"

namespace billboard {

struct RecomputeSummary {
  bool up_to_date = false;  // nothing changed since the last run
  long board_version = 0;
  std::size_t cells_scored = 0;
  std::vector<std::string> rejected_metrics;
  std::size_t metrics_ranked = 0;
  std::size_t generators_ranked = 0;
  std::string ensemble_signature;
  std::string ensemble_note;
  std::size_t overrate_rows = 0;
  std::vector<std::string> files_written;
  double wall_seconds = 0.0;
};

Json to_json(const RecomputeSummary& summary);

/// Runs every analysis over one snapshot: metric ranking, ensemble (three or
/// more metrics with judgments), generator ranking, overrating report.
/// Registers the ensemble in `registry`.
Artifacts analyze(const Snapshot& snapshot, const EnsembleRegistry& registry);

/// Scores pending cells (a failing metric is rejected and the run goes on),
/// then analyzes the new snapshot and writes the reports. Files are written
/// only when their bytes change; a run with nothing new is a no-op.
RecomputeSummary recompute(Board& board);

/// Reports as last written by recompute, or rendered from the board's
/// inventory when recompute has not run.
std::string current_report(const Board& board, ReportKind kind, ReportFormat format);

EnsembleRegistry registry_for(const Board& board);

}  // namespace billboard
