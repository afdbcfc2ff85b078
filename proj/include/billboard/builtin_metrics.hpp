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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace billboard::metrics {

/// Token n-gram multiset for orders 1..max_order.
struct NGramProfile {
  std::map<std::vector<std::string>, int> counts;
  std::size_t token_count = 0;
};

NGramProfile ngram_profile(std::span<const std::string> tokens, int max_order = 4);

/// Smoothed sentence-level BLEU-4 in [0, 1].
///
/// Modified n-gram precision clips each candidate n-gram count by its maximum
/// count in any single reference. An order with zero matches uses the floor
/// 1 / (2 * candidate n-gram count); orders the candidate is too short for are
/// left out of the geometric mean. The brevity penalty uses the reference
/// length closest to the candidate length, preferring the shorter one on a tie.
/// Text is lowercased and punctuation is split off before whitespace
/// tokenization. An empty candidate scores 0.
double sentence_bleu(std::string_view candidate, std::span<const std::string> references);

/// chrF with beta = 2 against one reference. Whitespace is removed, character
/// n-gram precision and recall are averaged over the orders 1..6 for which
/// both sides have at least one n-gram, and combined into the F-beta score.
double chrf_single(std::string_view candidate, std::string_view reference);

/// Maximum of chrf_single over the references.
double chrf(std::string_view candidate, std::span<const std::string> references);

struct BuiltinMetric {
  std::string_view name;
  bool native_multi_ref;
  bool higher_better;
  double (*score)(std::string_view candidate, std::span<const std::string> references);
};

std::span<const BuiltinMetric> builtin_metrics();
const BuiltinMetric* find_builtin(std::string_view name);

}  // namespace billboard::metrics
