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

#include "billboard/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "billboard/ensemble.hpp"
#include "billboard/errors.hpp"
#include "billboard/kernels.hpp"
#include "billboard/panel.hpp"

namespace billboard {
namespace {

void check_pair(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.size() != y.size()) {
    throw ValidationError(std::string(what) + ": length mismatch (" + std::to_string(x.size()) +
                          " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw ValidationError(std::string(what) + ": need at least 2 points");
}

bool is_constant(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo == *hi;
}

/// Merge sort of `v` counting the pairs (i < j) with v[i] > v[j].
long long count_inversions(std::vector<double>& v) {
  std::vector<double> buf(v.size());
  long long swaps = 0;
  for (std::size_t width = 1; width < v.size(); width *= 2) {
    for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, v.size());
      const std::size_t hi = std::min(lo + 2 * width, v.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += static_cast<long long>(mid - i);
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    std::swap(v, buf);
  }
  return swaps;
}

/// Sum of t(t-1)/2 over runs of equal values in a sorted sequence.
template <typename Eq>
long long tied_pairs(std::size_t n, Eq&& equal_to_next) {
  long long total = 0;
  long long run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (equal_to_next(i - 1, i)) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total + run * (run - 1) / 2;
}

}  // namespace

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "pearson");
  if (is_constant(x) || is_constant(y)) return {0.0, true};
  const double mx = kernels::mean(x);
  const double my = kernels::mean(y);
  const double sxy = kernels::centered_dot(x, mx, y, my);
  const double sxx = kernels::centered_dot(x, mx, x, mx);
  const double syy = kernels::centered_dot(y, my, y, my);
  const double r = sxy / std::sqrt(sxx * syy);
  return {std::clamp(r, -1.0, 1.0), false};
}

Correlation kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "kendall_tau_b");
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  const long long n0 = static_cast<long long>(n) * static_cast<long long>(n - 1) / 2;
  const long long x_ties =
      tied_pairs(n, [&](std::size_t a, std::size_t b) { return x[order[a]] == x[order[b]]; });
  const long long joint_ties = tied_pairs(n, [&](std::size_t a, std::size_t b) {
    return x[order[a]] == x[order[b]] && y[order[a]] == y[order[b]];
  });
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const long long discordant = count_inversions(ys);  // ys is now sorted
  const long long y_ties = tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

  const long long denom_x = n0 - x_ties;
  const long long denom_y = n0 - y_ties;
  if (denom_x == 0 || denom_y == 0) return {0.0, true};
  const long long numerator = n0 - x_ties - y_ties + joint_ties - 2 * discordant;
  const double tau = static_cast<double>(numerator) /
                     std::sqrt(static_cast<double>(denom_x) * static_cast<double>(denom_y));
  return {std::clamp(tau, -1.0, 1.0), false};
}

Standardized standardize(std::span<const double> v) {
  if (v.size() < 2) throw ValidationError("standardize: need at least 2 values");
  if (is_constant(v)) throw DegenerateError("standardize: zero variance");
  Standardized out;
  out.mean = kernels::mean(v);
  out.std = std::sqrt(kernels::centered_dot(v, out.mean, v, out.mean) /
                      static_cast<double>(v.size() - 1));
  if (!(out.std > 0.0)) throw DegenerateError("standardize: zero variance");
  out.z.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.z[i] = (v[i] - out.mean) / out.std;
  return out;
}

std::vector<MetricRankingEntry> rank_metrics(const Snapshot& snapshot) {
  const auto generators = correlation_generators(snapshot);
  if (generators.empty()) throw ValidationError("no annotated generators to correlate against");
  const auto metric_ids = snapshot.active_metric_ids();
  for (const auto& m : metric_ids) {
    for (const auto& g : generators) {
      if (!snapshot.scores.has(m, g)) {
        throw ValidationError("metric '" + m + "' has not been scored on generator '" + g + "'");
      }
    }
  }
  const Panel panel = build_panel(snapshot, metric_ids, generators);

  std::vector<double> system_human(generators.size(), 0.0);
  for (std::size_t r = 0; r < panel.rows(); ++r) system_human[panel.group[r]] += panel.human[r];
  for (double& v : system_human) v /= static_cast<double>(panel.instances);

  std::vector<MetricRankingEntry> out;
  for (std::size_t j = 0; j < metric_ids.size(); ++j) {
    MetricRankingEntry e;
    e.metric_id = metric_ids[j];
    const Correlation p = pearson(panel.columns[j], panel.human);
    e.pearson_instance = p.value;
    e.degenerate = is_constant(panel.columns[j]);
    e.n_pairs = static_cast<long>(panel.rows());
    std::vector<double> system_metric;
    for (const auto& g : generators) system_metric.push_back(snapshot.scores.aggregate(e.metric_id, g));
    e.kendall_system = generators.size() >= 2 ? kendall_tau_b(system_metric, system_human).value : 0.0;
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const MetricRankingEntry& a, const MetricRankingEntry& b) {
    if (a.pearson_instance != b.pearson_instance) return a.pearson_instance > b.pearson_instance;
    if (a.kendall_system != b.kendall_system) return a.kendall_system > b.kendall_system;
    return a.metric_id < b.metric_id;
  });
  return out;
}

std::vector<GeneratorRankingEntry> rank_scores(std::vector<std::pair<std::string, double>> scores) {
  std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<GeneratorRankingEntry> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int rank = (i > 0 && scores[i].second == scores[i - 1].second)
                         ? out.back().rank
                         : static_cast<int>(i) + 1;
    out.push_back({scores[i].first, scores[i].second, rank});
  }
  return out;
}

GeneratorRanking rank_generators(const Snapshot& snapshot,
                                 std::span<const MetricRankingEntry> ranking,
                                 const EnsembleModel* ensemble) {
  if (ranking.empty()) throw ValidationError("rank_generators: metric ranking is empty");
  const MetricRankingEntry* best = &ranking.front();
  for (const auto& e : ranking) {
    if (e.pearson_instance > best->pearson_instance) best = &e;
  }
  GeneratorRanking out;
  std::vector<std::pair<std::string, double>> scores;
  if (ensemble != nullptr && ensemble->cv_correlation > best->pearson_instance) {
    out.scorer = ensemble->signature;
    out.scorer_is_ensemble = true;
    out.scorer_correlation = ensemble->cv_correlation;
    for (const auto& [gid, g] : snapshot.generators) {
      double total = 0.0;
      for (std::size_t k = 0; k < snapshot.testset.size(); ++k) {
        std::map<std::string, double> row;
        for (const auto& term : ensemble->terms) {
          if (term.weight == 0.0) continue;
          row[term.metric_id] = snapshot.scores.column(term.metric_id, gid).at(k).oriented;
        }
        total += ensemble_score(*ensemble, row);
      }
      scores.emplace_back(gid, total / static_cast<double>(snapshot.testset.size()));
    }
  } else {
    out.scorer = best->metric_id;
    out.scorer_correlation = best->pearson_instance;
    for (const auto& [gid, g] : snapshot.generators) {
      scores.emplace_back(gid, snapshot.scores.aggregate(best->metric_id, gid));
    }
  }
  out.entries = rank_scores(std::move(scores));
  return out;
}

}  // namespace billboard
