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

namespace billboard {

/// Paired (metric scores, human score) rows over annotated generators.
/// Rows are generator-major: row = g * instances + k.
struct Panel {
  std::vector<std::string> generator_ids;
  std::vector<GeneratorKind> kinds;
  std::size_t instances = 0;
  std::vector<std::string> metric_ids;
  std::vector<std::vector<double>> columns;  // oriented scores, one per metric
  std::vector<double> human;
  std::vector<int> group;    // generator index per row
  std::vector<int> example;  // instance index per row

  std::size_t rows() const noexcept { return human.size(); }
  /// Index of a metric column; throws NotFoundError.
  std::size_t column_index(const std::string& metric_id) const;
};

/// Annotated generators entering correlation pools (human-kind ones only
/// when the board config includes them).
std::vector<std::string> correlation_generators(const Snapshot& snapshot);

/// Builds the panel for `metric_ids` over `generator_ids`. When
/// `analysis_tensor` is set, scores come from the overrating-analysis tensor.
Panel build_panel(const Snapshot& snapshot, const std::vector<std::string>& metric_ids,
                  const std::vector<std::string>& generator_ids, bool analysis_tensor = false);

}  // namespace billboard
