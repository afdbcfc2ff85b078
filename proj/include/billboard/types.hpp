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
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace billboard {

using Json = nlohmann::json;

enum class GeneratorKind { machine, human };
enum class Direction { higher_better, lower_better };
enum class MetricStatus { active, rejected };

std::string_view to_string(GeneratorKind kind);
std::string_view to_string(Direction direction);
std::string_view to_string(MetricStatus status);
GeneratorKind parse_generator_kind(std::string_view s);
Direction parse_direction(std::string_view s);

/// Identifiers double as file names: [A-Za-z0-9._-]+, not starting with '.'.
void validate_identifier(std::string_view what, std::string_view id);

struct Reference {
  std::string tag;
  std::string text;
};

struct Instance {
  std::string instance_id;
  std::string source_text;
  std::vector<Reference> references;

  /// Reference texts whose tag is in `tags`; all references when `tags` is empty.
  std::vector<std::string> reference_texts(const std::vector<std::string>& tags) const;
};

/// Ordered evaluation corpus with unique instance ids.
class TestSet {
 public:
  TestSet() = default;
  explicit TestSet(std::vector<Instance> instances);

  std::size_t size() const noexcept { return instances_.size(); }
  bool empty() const noexcept { return instances_.empty(); }
  const std::vector<Instance>& instances() const noexcept { return instances_; }
  const Instance& at(std::size_t k) const { return instances_.at(k); }
  std::optional<std::size_t> index_of(const std::string& instance_id) const;
  /// Distinct reference tags, sorted.
  std::vector<std::string> reference_tags() const;

 private:
  std::vector<Instance> instances_;
  std::map<std::string, std::size_t> index_;
};

struct GeneratorSubmission {
  std::string generator_id;
  GeneratorKind kind = GeneratorKind::machine;
  std::map<std::string, std::string> outputs;  // instance_id -> text
  std::string submitted_at;
  std::string description;
};

struct Executor {
  enum class Type { builtin, external };
  Type type = Type::builtin;
  std::string builtin_name;
  std::vector<std::string> command;

  static Executor builtin(std::string name);
  static Executor external(std::vector<std::string> argv);
  bool is_builtin() const noexcept { return type == Type::builtin; }
};

struct MetricSpec {
  std::string metric_id;
  Direction direction = Direction::higher_better;
  bool needs_references = true;
  bool needs_source = false;
  bool native_multi_ref = false;
  Executor executor;
  double timeout_seconds = 600.0;
  std::string version_tag;

  void validate() const;
};

struct MetricRecord {
  MetricSpec spec;
  MetricStatus status = MetricStatus::active;
  std::string diagnostic;
  std::string submitted_at;
};

struct HumanJudgments {
  std::map<std::pair<std::string, std::string>, double> entries;  // (generator, instance)
  std::string rubric_note;

  bool empty() const noexcept { return entries.empty(); }
  /// Sorted generator ids that carry judgments.
  std::vector<std::string> annotated_generators() const;
  double score(const std::string& generator_id, const std::string& instance_id) const;
  /// Instances exist, panel is rectangular, at least two annotated generators.
  void validate(const TestSet& testset) const;
};

struct ScoreCell {
  double raw = 0.0;
  double oriented = 0.0;
};

/// One metric's scores for one generator, in test-set order.
using ScoreColumn = std::vector<ScoreCell>;

struct ScoreTensor {
  std::map<std::string, std::map<std::string, ScoreColumn>> cells;  // metric -> generator

  bool has(const std::string& metric_id, const std::string& generator_id) const;
  const ScoreColumn& column(const std::string& metric_id, const std::string& generator_id) const;
  /// Mean oriented score over the column (s_{i,j}).
  double aggregate(const std::string& metric_id, const std::string& generator_id) const;
};

/// Restricted reference set for the overrating analysis: the human generator
/// being evaluated and the reference tags every generator is scored against.
struct MixedEffectsConfig {
  std::string evaluated_human;
  std::vector<std::string> reference_tags;
};

struct BoardConfig {
  std::string board_id;
  std::vector<std::string> reference_tags;  // empty: every tag in the test set
  long version = 1;
  bool include_human_in_correlation = true;
  std::optional<MixedEffectsConfig> mixed_effects;
  std::string rubric_note;
};

/// Concatenated tags, e.g. {"A","B"} -> "AB".
std::string join_tags(const std::vector<std::string>& tags);

// JSON encodings used for board files and the HTTP API.
Json to_json(const Instance& instance);
Instance instance_from_json(const Json& j);
Json to_json(const MetricSpec& spec);
MetricSpec metric_spec_from_json(const Json& j);
Json to_json(const Executor& executor);
Executor executor_from_json(const Json& j);
Json to_json(const BoardConfig& config);
BoardConfig board_config_from_json(const Json& j);
Json generator_meta_to_json(const GeneratorSubmission& g);

}  // namespace billboard
