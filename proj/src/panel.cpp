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

#include "billboard/panel.hpp"

#include "billboard/errors.hpp"

namespace billboard {

std::size_t Panel::column_index(const std::string& metric_id) const {
  for (std::size_t j = 0; j < metric_ids.size(); ++j) {
    if (metric_ids[j] == metric_id) return j;
  }
  throw NotFoundError("metric '" + metric_id + "' is not in the panel");
}

std::vector<std::string> correlation_generators(const Snapshot& snapshot) {
  std::vector<std::string> out;
  for (const auto& id : snapshot.annotated_generator_ids()) {
    const auto& g = snapshot.generators.at(id);
    if (g.kind == GeneratorKind::human && !snapshot.config.include_human_in_correlation) continue;
    out.push_back(id);
  }
  return out;
}

Panel build_panel(const Snapshot& snapshot, const std::vector<std::string>& metric_ids,
                  const std::vector<std::string>& generator_ids, bool analysis_tensor) {
  Panel p;
  p.metric_ids = metric_ids;
  p.generator_ids = generator_ids;
  p.instances = snapshot.testset.size();
  const std::size_t n = generator_ids.size() * p.instances;
  p.human.reserve(n);
  p.group.reserve(n);
  p.example.reserve(n);
  for (std::size_t g = 0; g < generator_ids.size(); ++g) {
    const auto& gen = snapshot.generators.at(generator_ids[g]);
    p.kinds.push_back(gen.kind);
    for (std::size_t k = 0; k < p.instances; ++k) {
      p.human.push_back(
          snapshot.judgments.score(generator_ids[g], snapshot.testset.at(k).instance_id));
      p.group.push_back(static_cast<int>(g));
      p.example.push_back(static_cast<int>(k));
    }
  }
  p.columns.reserve(metric_ids.size());
  for (const auto& m : metric_ids) {
    std::vector<double> col;
    col.reserve(n);
    for (const auto& gid : generator_ids) {
      const ScoreColumn& cells =
          analysis_tensor ? snapshot.analysis_column(m, gid) : snapshot.scores.column(m, gid);
      for (const auto& c : cells) col.push_back(c.oriented);
    }
    p.columns.push_back(std::move(col));
  }
  return p;
}

}  // namespace billboard
