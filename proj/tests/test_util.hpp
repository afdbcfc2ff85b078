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

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "billboard/datastore.hpp"

namespace billboard::testing {

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "billboard-test-XXXXXX").string();
    char* made = mkdtemp(tmpl.data());
    if (made == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = made;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string fixture(const std::string& name) {
  return std::string(BILLBOARD_FIXTURES) + "/" + name;
}

inline void write_text(const std::filesystem::path& p, const std::string& content) {
  write_file_atomic(p, content);
}

inline TestSet make_testset(std::size_t k, std::vector<std::string> tags = {"A"}) {
  std::vector<Instance> instances;
  for (std::size_t i = 0; i < k; ++i) {
    Instance inst;
    inst.instance_id = "x" + std::to_string(i + 1);
    inst.source_text = "source " + std::to_string(i + 1);
    for (const auto& t : tags) {
      inst.references.push_back({t, "reference " + t + " for item " + std::to_string(i + 1)});
    }
    instances.push_back(std::move(inst));
  }
  return TestSet(std::move(instances));
}

inline GeneratorSubmission make_generator(const TestSet& ts, const std::string& id,
                                          GeneratorKind kind = GeneratorKind::machine,
                                          const std::string& prefix = "output") {
  GeneratorSubmission g;
  g.generator_id = id;
  g.kind = kind;
  for (const auto& inst : ts.instances()) {
    g.outputs[inst.instance_id] = prefix + " " + id + " " + inst.instance_id;
  }
  return g;
}

inline HumanJudgments make_judgments(const TestSet& ts, const std::vector<std::string>& gens,
                                     unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  HumanJudgments h;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    for (const auto& inst : ts.instances()) {
      h.entries[{gens[g], inst.instance_id}] = static_cast<double>(g) + noise(rng);
    }
  }
  return h;
}

inline MetricSpec builtin_spec(const std::string& id, const std::string& builtin,
                               Direction dir = Direction::higher_better) {
  MetricSpec s;
  s.metric_id = id;
  s.direction = dir;
  s.needs_references = true;
  s.native_multi_ref = builtin == "sentence_bleu";
  s.executor = Executor::builtin(builtin);
  s.version_tag = "1";
  return s;
}

inline MetricSpec plugin_spec(const std::string& id, std::vector<std::string> args,
                              bool native = true, double timeout = 10.0) {
  MetricSpec s;
  s.metric_id = id;
  s.needs_references = true;
  s.native_multi_ref = native;
  std::vector<std::string> argv{"python3", fixture("fake_plugin.py")};
  argv.insert(argv.end(), args.begin(), args.end());
  s.executor = Executor::external(std::move(argv));
  s.timeout_seconds = timeout;
  s.version_tag = "1";
  return s;
}

/// In-memory board: generators with judgments human[g][k] and no metrics yet.
inline Snapshot synthetic_snapshot(const std::vector<std::string>& generator_ids,
                                   const std::vector<GeneratorKind>& kinds,
                                   const std::vector<std::vector<double>>& human,
                                   std::vector<std::string> tags = {"A"}) {
  Snapshot s;
  s.config.board_id = "synthetic";
  const std::size_t k = human.empty() ? 0 : human.front().size();
  s.testset = make_testset(k, std::move(tags));
  for (std::size_t g = 0; g < generator_ids.size(); ++g) {
    auto gen = make_generator(s.testset, generator_ids[g], kinds[g]);
    gen.submitted_at = "2026-01-01T00:00:00Z";
    s.generators[gen.generator_id] = gen;
    for (std::size_t i = 0; i < k; ++i) {
      s.judgments.entries[{generator_ids[g], s.testset.at(i).instance_id}] = human[g][i];
    }
  }
  return s;
}

/// Adds an oriented metric column per generator; values[g] follows generator id order.
inline void add_metric(Snapshot& s, const std::string& id,
                       const std::vector<std::vector<double>>& values,
                       Direction dir = Direction::higher_better) {
  MetricRecord rec;
  rec.spec = builtin_spec(id, "chrf", dir);
  rec.submitted_at = "2026-01-01T00:00:00Z";
  s.metrics[id] = rec;
  std::size_t g = 0;
  for (const auto& [gid, gen] : s.generators) {
    (void)gen;
    ScoreColumn col;
    for (double v : values[g]) col.push_back({dir == Direction::lower_better ? -v : v, v});
    s.scores.cells[id][gid] = col;
    ++g;
  }
}

/// Input files for a small judged board: testset.jsonl, judgments.jsonl,
/// <generator>.jsonl for g0..g3 and human1, and bleu/chrf/overlap specs.
struct Scenario {
  std::filesystem::path dir;
  std::vector<std::string> generators{"g0", "g1", "g2", "g3", "human1"};
  std::filesystem::path testset() const { return dir / "testset.jsonl"; }
  std::filesystem::path judgments() const { return dir / "judgments.jsonl"; }
  std::filesystem::path outputs(const std::string& g) const { return dir / (g + ".jsonl"); }
  std::filesystem::path spec(const std::string& m) const { return dir / (m + ".json"); }
};

inline Scenario write_scenario(const std::filesystem::path& dir, std::size_t k = 12) {
  Scenario sc;
  sc.dir = dir;
  std::filesystem::create_directories(dir);
  const TestSet ts = make_testset(k, {"A", "B"});
  std::string tsl, jl;
  for (const auto& inst : ts.instances()) tsl += to_json(inst).dump() + "\n";
  write_text(sc.testset(), tsl);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (std::size_t g = 0; g < sc.generators.size(); ++g) {
    std::string out;
    for (std::size_t i = 0; i < k; ++i) {
      const auto& inst = ts.at(i);
      const bool human = sc.generators[g] == "human1";
      const std::size_t keep = human ? 5 : 1 + (g * 7 + i * 3) % 5;
      std::string words[5] = {"reference", "A", "for", "item", std::to_string(i + 1)};
      std::string text;
      for (std::size_t w = 0; w < 5; ++w) text += (w ? " " : "") + (w < keep ? words[w] : "filler");
      out += Json{{"instance_id", inst.instance_id}, {"text", text}}.dump() + "\n";
      jl += Json{{"generator_id", sc.generators[g]},
                 {"instance_id", inst.instance_id},
                 {"score", static_cast<double>(keep) + noise(rng)}}
                .dump() +
            "\n";
    }
    write_text(sc.outputs(sc.generators[g]), out);
  }
  write_text(sc.judgments(), jl);
  write_text(sc.spec("bleu"), to_json(builtin_spec("bleu", "sentence_bleu")).dump());
  write_text(sc.spec("chrf"), to_json(builtin_spec("chrf", "chrf")).dump());
  write_text(sc.spec("overlap"), to_json(plugin_spec("overlap", {"overlap"})).dump());
  return sc;
}

inline Clock test_clock() { return fixed_clock("2026-01-01T00:00:00Z"); }

}  // namespace billboard::testing
