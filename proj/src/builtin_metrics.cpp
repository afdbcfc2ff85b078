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

#include "billboard/builtin_metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "billboard/text.hpp"

namespace billboard::metrics {
namespace {

constexpr int kBleuOrder = 4;
constexpr int kChrfOrder = 6;
constexpr double kChrfBeta = 2.0;

std::map<std::u32string, int> char_ngrams(const std::u32string& chars, std::size_t n) {
  std::map<std::u32string, int> counts;
  if (chars.size() < n) return counts;
  for (std::size_t i = 0; i + n <= chars.size(); ++i) ++counts[chars.substr(i, n)];
  return counts;
}

}  // namespace

NGramProfile ngram_profile(std::span<const std::string> tokens, int max_order) {
  NGramProfile profile;
  profile.token_count = tokens.size();
  for (int n = 1; n <= max_order; ++n) {
    const auto order = static_cast<std::size_t>(n);
    if (tokens.size() < order) break;
    for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
      ++profile.counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + order)];
    }
  }
  return profile;
}

double sentence_bleu(std::string_view candidate, std::span<const std::string> references) {
  const auto cand_tokens = text::tokenize(candidate);
  if (cand_tokens.empty()) return 0.0;
  const NGramProfile cand = ngram_profile(cand_tokens, kBleuOrder);

  std::map<std::vector<std::string>, int> max_ref_counts;
  const std::size_t cand_len = cand_tokens.size();
  std::size_t closest_len = 0;
  std::size_t best_diff = std::numeric_limits<std::size_t>::max();
  for (const auto& ref : references) {
    const auto ref_tokens = text::tokenize(ref);
    const std::size_t len = ref_tokens.size();
    const std::size_t diff = len > cand_len ? len - cand_len : cand_len - len;
    if (diff < best_diff || (diff == best_diff && len < closest_len)) {
      best_diff = diff;
      closest_len = len;
    }
    for (const auto& [gram, count] : ngram_profile(ref_tokens, kBleuOrder).counts) {
      int& slot = max_ref_counts[gram];
      slot = std::max(slot, count);
    }
  }

  std::array<long, kBleuOrder> matches{};
  for (const auto& [gram, count] : cand.counts) {
    auto it = max_ref_counts.find(gram);
    if (it != max_ref_counts.end()) matches[gram.size() - 1] += std::min(count, it->second);
  }

  double log_sum = 0.0;
  int used_orders = 0;
  for (int n = 1; n <= kBleuOrder; ++n) {
    const auto order = static_cast<std::size_t>(n);
    if (cand_len < order) break;
    const double denom = static_cast<double>(cand_len - order + 1);
    const long m = matches[order - 1];
    const double precision = m == 0 ? 1.0 / (2.0 * denom) : static_cast<double>(m) / denom;
    log_sum += std::log(precision);
    ++used_orders;
  }

  double brevity = 1.0;
  if (cand_len < closest_len) {
    brevity = std::exp(1.0 - static_cast<double>(closest_len) / static_cast<double>(cand_len));
  }
  return brevity * std::exp(log_sum / used_orders);
}

double chrf_single(std::string_view candidate, std::string_view reference) {
  const std::u32string cand = text::strip_whitespace(candidate);
  if (cand.empty()) return 0.0;
  const std::u32string ref = text::strip_whitespace(reference);

  double precision_sum = 0.0;
  double recall_sum = 0.0;
  int effective = 0;
  for (std::size_t n = 1; n <= kChrfOrder; ++n) {
    const auto cand_counts = char_ngrams(cand, n);
    const auto ref_counts = char_ngrams(ref, n);
    if (cand_counts.empty() || ref_counts.empty()) continue;
    long cand_total = 0;
    long ref_total = 0;
    long matched = 0;
    for (const auto& [gram, count] : cand_counts) {
      cand_total += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    for (const auto& entry : ref_counts) ref_total += entry.second;
    precision_sum += static_cast<double>(matched) / static_cast<double>(cand_total);
    recall_sum += static_cast<double>(matched) / static_cast<double>(ref_total);
    ++effective;
  }
  if (effective == 0) return 0.0;
  const double p = precision_sum / effective;
  const double r = recall_sum / effective;
  if (p + r == 0.0) return 0.0;
  const double b2 = kChrfBeta * kChrfBeta;
  return (1.0 + b2) * p * r / (b2 * p + r);
}

double chrf(std::string_view candidate, std::span<const std::string> references) {
  double best = 0.0;
  for (const auto& ref : references) best = std::max(best, chrf_single(candidate, ref));
  return best;
}

std::span<const BuiltinMetric> builtin_metrics() {
  static constexpr std::array<BuiltinMetric, 2> registry{{
      {"sentence_bleu", true, true, &sentence_bleu},
      {"chrf", false, true, &chrf},
  }};
  return registry;
}

const BuiltinMetric* find_builtin(std::string_view name) {
  for (const auto& m : builtin_metrics()) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

}  // namespace billboard::metrics
