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

#include <span>
#include <string>
#include <vector>

#include "billboard/datastore.hpp"

namespace billboard {

struct EnsembleModel;

/// A correlation value; `degenerate` marks a zero-variance input, for which
/// the value is reported as 0.
struct Correlation {
  double value = 0.0;
  bool degenerate = false;
};

/// Sample Pearson r. Requires equal lengths >= 2.
Correlation pearson(std::span<const double> x, std::span<const double> y);

/// Kendall tau-b with tie correction, O(n log n).
Correlation kendall_tau_b(std::span<const double> x, std::span<const double> y);

struct Standardized {
  std::vector<double> z;
  double mean = 0.0;
  double std = 0.0;
};

/// z = (v - mean) / std with the n-1 sample deviation. Throws DegenerateError
/// for constant input.
Standardized standardize(std::span<const double> v);

struct MetricRankingEntry {
  std::string metric_id;
  double pearson_instance = 0.0;
  double kendall_system = 0.0;
  long n_pairs = 0;
  bool degenerate = false;
};

/// Metrics sorted by instance-level Pearson (desc), then Kendall (desc), then id.
std::vector<MetricRankingEntry> rank_metrics(const Snapshot& snapshot);

struct GeneratorRankingEntry {
  std::string generator_id;
  double score = 0.0;
  int rank = 0;
};

struct GeneratorRanking {
  std::string scorer;  // metric id or ensemble signature
  bool scorer_is_ensemble = false;
  double scorer_correlation = 0.0;
  std::vector<GeneratorRankingEntry> entries;
};

/// Ranks every submitted generator by the best-correlated scorer among the
/// ranked metrics and, when given, the ensemble (by its cross-validated
/// correlation). Ties share the smallest rank.
GeneratorRanking rank_generators(const Snapshot& snapshot,
                                 std::span<const MetricRankingEntry> ranking,
                                 const EnsembleModel* ensemble);

/// Competition ranking ("1224") of scores sorted descending, ties by id.
std::vector<GeneratorRankingEntry> rank_scores(
    std::vector<std::pair<std::string, double>> scores);

}  // namespace billboard
