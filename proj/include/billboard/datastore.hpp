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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "billboard/types.hpp"

namespace billboard {

/// Which score tensor a column belongs to: the board's reference tags, or the
/// restricted tag set used by the overrating analysis.
enum class TensorKind { main, restricted };

struct PendingCell {
  std::string metric_id;
  std::string generator_id;
  TensorKind tensor = TensorKind::main;

  auto operator<=>(const PendingCell&) const = default;
};

/// Immutable view of a whole board. Obtained from Board::snapshot().
struct Snapshot {
  BoardConfig config;
  TestSet testset;
  std::map<std::string, GeneratorSubmission> generators;
  std::map<std::string, MetricRecord> metrics;
  HumanJudgments judgments;
  ScoreTensor scores;
  ScoreTensor restricted_scores;

  /// Tags used for scoring; the config's tags or every tag in the test set.
  std::vector<std::string> scoring_tags() const;
  /// Tags for the restricted tensor, or nullopt when no restricted analysis is set up.
  std::optional<std::vector<std::string>> restricted_tags() const;
  /// Whether a metric needs its own restricted-tensor column.
  bool needs_restricted_column(const MetricRecord& metric) const;
  /// Column for the overrating analysis (restricted when configured).
  const ScoreColumn& analysis_column(const std::string& metric_id,
                                     const std::string& generator_id) const;

  /// Active metrics, sorted by id.
  std::vector<std::string> active_metric_ids() const;
  /// Judged generators that have been submitted, sorted by id.
  std::vector<std::string> annotated_generator_ids() const;
  std::vector<PendingCell> pending_cells() const;
  /// Latest accepted submission time, or "" for an empty board.
  std::string latest_submission_time() const;
};

using SnapshotPtr = std::shared_ptr<const Snapshot>;

Json snapshot_to_json(const Snapshot& snapshot);
Snapshot snapshot_from_json(const Json& j);
/// Canonical serialization: sorted keys, no insignificant whitespace.
std::string serialize(const Snapshot& snapshot);
Snapshot deserialize(const std::string& text);

/// Parses a JSONL test set. Errors name the offending 1-based line.
TestSet load_testset(const std::filesystem::path& path);
/// JSONL lines {generator_id, instance_id, score}; validated against `testset`.
HumanJudgments load_judgments(const std::filesystem::path& path, const TestSet& testset);
/// JSONL lines {instance_id, text}.
std::map<std::string, std::string> load_outputs(const std::filesystem::path& path);
std::map<std::string, std::string> parse_outputs(const Json& array);

/// Timestamp source. The default honours SOURCE_DATE_EPOCH, else wall time.
using Clock = std::function<std::string()>;
std::string system_timestamp();
Clock fixed_clock(std::string timestamp);

struct Receipt {
  std::string id;
  std::string accepted_at;
  long version = 0;
};

/// Exclusive advisory lock on a board directory (flock on <board>/.lock).
class BoardLock {
 public:
  explicit BoardLock(const std::filesystem::path& board_dir);
  ~BoardLock();
  BoardLock(const BoardLock&) = delete;
  BoardLock& operator=(const BoardLock&) = delete;

 private:
  int fd_ = -1;
};

/// The on-disk board. All mutations are serialized through one mutex; the
/// snapshot returned by snapshot() is never modified afterwards.
class Board {
 public:
  static Board create(const std::filesystem::path& dir, BoardConfig config, TestSet testset,
                      HumanJudgments judgments, Clock clock = system_timestamp);
  static Board open(const std::filesystem::path& dir, Clock clock = system_timestamp);

  Board(Board&&) noexcept;
  Board& operator=(Board&&) noexcept;
  ~Board();

  const std::filesystem::path& root() const;

  Receipt add_generator(GeneratorSubmission submission);
  /// Persists a validated spec; smoke testing is the caller's job (see submit_metric).
  Receipt add_metric(MetricSpec spec);
  void store_scores(const std::string& metric_id, const std::string& generator_id,
                    ScoreColumn column, TensorKind tensor);
  void reject_metric(const std::string& metric_id, const std::string& diagnostic);

  SnapshotPtr snapshot() const;

  /// Writes <board>/<relative> only when the bytes differ. Returns true on write.
  bool write_artifact(const std::filesystem::path& relative, const std::string& content);
  std::optional<std::string> read_artifact(const std::filesystem::path& relative) const;

 private:
  struct Impl;
  explicit Board(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

/// Writes a file through a temporary and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace billboard
