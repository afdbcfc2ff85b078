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

#include "billboard/pipeline.hpp"

#include <chrono>
#include <cstdint>
#include <set>

#include <fmt/format.h>

#include "billboard/errors.hpp"
#include "billboard/metric_runner.hpp"

namespace billboard {
namespace {

constexpr const char* kStateFile = "reports/state.json";

std::string fingerprint(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

std::size_t score_pending(Board& board, std::vector<std::string>& rejected) {
  const SnapshotPtr snap = board.snapshot();
  std::size_t scored = 0;
  std::set<std::string> failed;
  for (const auto& cell : snap->pending_cells()) {
    if (failed.count(cell.metric_id)) continue;
    const auto& spec = snap->metrics.at(cell.metric_id).spec;
    const auto tags =
        cell.tensor == TensorKind::main ? snap->scoring_tags() : *snap->restricted_tags();
    try {
      const auto raw = score_generator(spec, snap->generators.at(cell.generator_id),
                                       snap->testset, tags);
      board.store_scores(cell.metric_id, cell.generator_id, make_column(spec, raw), cell.tensor);
      ++scored;
    } catch (const ScoringError& e) {
      std::string diag = "generator '" + cell.generator_id + "': " + e.what();
      if (!e.diagnostics().empty()) diag += "\n" + e.diagnostics();
      board.reject_metric(cell.metric_id, diag);
      failed.insert(cell.metric_id);
      rejected.push_back(cell.metric_id);
    }
  }
  return scored;
}

}  // namespace

Json to_json(const RecomputeSummary& s) {
  return {{"up_to_date", s.up_to_date},
          {"board_version", s.board_version},
          {"cells_scored", s.cells_scored},
          {"rejected_metrics", s.rejected_metrics},
          {"metrics_ranked", s.metrics_ranked},
          {"generators_ranked", s.generators_ranked},
          {"ensemble_signature", s.ensemble_signature},
          {"ensemble_note", s.ensemble_note},
          {"overrate_rows", s.overrate_rows},
          {"files_written", s.files_written},
          {"wall_seconds", s.wall_seconds}};
}

EnsembleRegistry registry_for(const Board& board) {
  return EnsembleRegistry(board.root() / "ensembles");
}

Artifacts analyze(const Snapshot& snapshot, const EnsembleRegistry& registry) {
  Artifacts a = inventory(snapshot);
  a.metric_ranking_note.clear();
  a.ensemble_note.clear();
  a.overrate_note.clear();

  const auto metrics = snapshot.active_metric_ids();
  const auto correlated = correlation_generators(snapshot);
  if (metrics.empty()) {
    a.metric_ranking_note = "no metrics";
  } else if (snapshot.judgments.empty() || correlated.empty()) {
    a.metric_ranking_note = "no judged generators have been submitted";
  } else {
    a.metric_ranking = rank_metrics(snapshot);
  }

  if (metrics.size() < 3) {
    a.ensemble_note = "fewer than 3 metrics";
  } else if (snapshot.judgments.empty()) {
    a.ensemble_note = "no human judgments";
  } else if (correlated.size() < 3) {
    a.ensemble_note = "fewer than 3 annotated generators";
  } else if (ensemble_inputs(snapshot).size() < 3) {
    a.ensemble_note = "fewer than 3 metrics with nonzero variance";
  } else {
    a.ensemble = build_ensemble(snapshot, registry);
    if (a.ensemble->selected().size() >= 2) a.ablation = ablate_ensemble(snapshot, *a.ensemble);
  }

  if (!a.metric_ranking.empty()) {
    a.generator_ranking = rank_generators(snapshot, a.metric_ranking,
                                          a.ensemble ? &*a.ensemble : nullptr);
  }

  bool has_human = false;
  bool has_machine = false;
  for (const auto& g : design_generators(snapshot)) {
    (snapshot.generators.at(g).kind == GeneratorKind::human ? has_human : has_machine) = true;
  }
  if (metrics.empty()) {
    a.overrate_note = "no metrics";
  } else if (!has_human) {
    a.overrate_note = "no judged human-kind generator";
  } else if (!has_machine) {
    a.overrate_note = "no judged machine-kind generator";
  } else {
    a.overrate = overrate_report(snapshot, a.ensemble ? &*a.ensemble : nullptr);
  }
  return a;
}

RecomputeSummary recompute(Board& board) {
  const auto start = std::chrono::steady_clock::now();
  RecomputeSummary summary;
  summary.cells_scored = score_pending(board, summary.rejected_metrics);

  const SnapshotPtr snap = board.snapshot();
  summary.board_version = snap->config.version;
  const std::string key = fingerprint(serialize(*snap));

  const EnsembleRegistry registry = registry_for(board);
  const auto previous = board.read_artifact(kStateFile);
  bool reports_present = previous.has_value();
  if (previous) {
    const Json state = Json::parse(*previous, nullptr, false);
    if (!state.is_discarded() && state.value("fingerprint", "") == key) {
      for (const auto& [file, bytes] : render_reports(inventory(*snap))) {
        if (!board.read_artifact("reports/" + file)) reports_present = false;
      }
      if (reports_present) {
        summary.up_to_date = true;
        summary.ensemble_signature = state.value("ensemble_signature", "");
        summary.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return summary;
      }
    }
  }

  const Artifacts artifacts = analyze(*snap, registry);
  auto files = render_reports(artifacts);
  summary.metrics_ranked = artifacts.metric_ranking.size();
  summary.generators_ranked =
      artifacts.generator_ranking ? artifacts.generator_ranking->entries.size() : 0;
  if (artifacts.ensemble) summary.ensemble_signature = artifacts.ensemble->signature;
  summary.ensemble_note = artifacts.ensemble_note;
  summary.overrate_rows = artifacts.overrate ? artifacts.overrate->rows.size() : 0;

  const Json state = {{"fingerprint", key},
                      {"board_version", snap->config.version},
                      {"ensemble_signature", summary.ensemble_signature}};
  files["state.json"] = state.dump(2) + "\n";
  for (const auto& [file, bytes] : files) {
    if (board.write_artifact("reports/" + file, bytes)) summary.files_written.push_back(file);
  }
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

std::string current_report(const Board& board, ReportKind kind, ReportFormat format) {
  const std::string file =
      "reports/" + std::string(to_string(kind)) + "." + std::string(extension(format));
  if (auto bytes = board.read_artifact(file)) return *bytes;
  return render(inventory(*board.snapshot()), kind, format);
}

}  // namespace billboard
