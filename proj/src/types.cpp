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

#include "billboard/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "billboard/builtin_metrics.hpp"
#include "billboard/errors.hpp"
#include "billboard/text.hpp"

namespace billboard {

std::string_view to_string(GeneratorKind kind) {
  return kind == GeneratorKind::machine ? "machine" : "human";
}

std::string_view to_string(Direction direction) {
  return direction == Direction::higher_better ? "higher_better" : "lower_better";
}

std::string_view to_string(MetricStatus status) {
  return status == MetricStatus::active ? "active" : "rejected";
}

GeneratorKind parse_generator_kind(std::string_view s) {
  if (s == "machine") return GeneratorKind::machine;
  if (s == "human") return GeneratorKind::human;
  throw ValidationError("generator kind must be 'machine' or 'human', got '" + std::string(s) +
                        "'");
}

Direction parse_direction(std::string_view s) {
  if (s == "higher_better") return Direction::higher_better;
  if (s == "lower_better") return Direction::lower_better;
  throw ValidationError("direction must be 'higher_better' or 'lower_better', got '" +
                        std::string(s) + "'");
}

void validate_identifier(std::string_view what, std::string_view id) {
  if (id.empty()) throw ValidationError(std::string(what) + " must be non-empty");
  if (id.front() == '.') {
    throw ValidationError(std::string(what) + " '" + std::string(id) +
                          "' must not start with '.'");
  }
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) {
      throw ValidationError(std::string(what) + " '" + std::string(id) +
                            "' may only contain letters, digits, '.', '_' and '-'");
    }
  }
}

std::vector<std::string> Instance::reference_texts(const std::vector<std::string>& tags) const {
  std::vector<std::string> out;
  for (const auto& ref : references) {
    if (tags.empty() || std::find(tags.begin(), tags.end(), ref.tag) != tags.end()) {
      out.push_back(ref.text);
    }
  }
  return out;
}

TestSet::TestSet(std::vector<Instance> instances) : instances_(std::move(instances)) {
  for (std::size_t k = 0; k < instances_.size(); ++k) {
    const Instance& inst = instances_[k];
    if (inst.instance_id.empty()) throw ValidationError("instance_id must be non-empty");
    if (inst.references.empty()) {
      throw ValidationError("instance '" + inst.instance_id + "' has no references");
    }
    if (!index_.emplace(inst.instance_id, k).second) {
      throw ValidationError("duplicate instance_id '" + inst.instance_id + "'");
    }
  }
}

std::optional<std::size_t> TestSet::index_of(const std::string& instance_id) const {
  auto it = index_.find(instance_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> TestSet::reference_tags() const {
  std::set<std::string> tags;
  for (const auto& inst : instances_) {
    for (const auto& ref : inst.references) tags.insert(ref.tag);
  }
  return {tags.begin(), tags.end()};
}

Executor Executor::builtin(std::string name) {
  Executor e;
  e.type = Type::builtin;
  e.builtin_name = std::move(name);
  return e;
}

Executor Executor::external(std::vector<std::string> argv) {
  Executor e;
  e.type = Type::external;
  e.command = std::move(argv);
  return e;
}

void MetricSpec::validate() const {
  validate_identifier("metric_id", metric_id);
  if (!(timeout_seconds > 0.0) || !std::isfinite(timeout_seconds)) {
    throw ValidationError("metric '" + metric_id + "': timeout_seconds must be positive");
  }
  if (executor.is_builtin()) {
    const auto* builtin = metrics::find_builtin(executor.builtin_name);
    if (builtin == nullptr) {
      throw ValidationError("metric '" + metric_id + "': unknown builtin '" +
                            executor.builtin_name + "'");
    }
    if (builtin->native_multi_ref != native_multi_ref) {
      throw ValidationError("metric '" + metric_id + "': builtin '" + executor.builtin_name +
                            "' requires native_multi_ref=" +
                            (builtin->native_multi_ref ? "true" : "false"));
    }
    if (!needs_references) {
      throw ValidationError("metric '" + metric_id + "': builtin '" + executor.builtin_name +
                            "' needs references");
    }
  } else if (executor.command.empty() || executor.command.front().empty()) {
    throw ValidationError("metric '" + metric_id + "': external executor command is empty");
  }
}

std::vector<std::string> HumanJudgments::annotated_generators() const {
  std::set<std::string> ids;
  for (const auto& [key, score] : entries) ids.insert(key.first);
  return {ids.begin(), ids.end()};
}

double HumanJudgments::score(const std::string& generator_id,
                             const std::string& instance_id) const {
  auto it = entries.find({generator_id, instance_id});
  if (it == entries.end()) {
    throw NotFoundError("no human judgment for (" + generator_id + ", " + instance_id + ")");
  }
  return it->second;
}

void HumanJudgments::validate(const TestSet& testset) const {
  std::map<std::string, std::set<std::string>> by_generator;
  for (const auto& [key, score] : entries) {
    if (!testset.index_of(key.second)) {
      throw ValidationError("human judgment references unknown instance '" + key.second + "'");
    }
    if (!std::isfinite(score)) {
      throw ValidationError("human judgment for (" + key.first + ", " + key.second +
                            ") is not finite");
    }
    by_generator[key.first].insert(key.second);
  }
  if (entries.empty()) return;
  if (by_generator.size() < 2) {
    throw ValidationError("human judgments must cover at least 2 generators");
  }
  for (const auto& [gen, instances] : by_generator) {
    if (instances.size() != testset.size()) {
      throw ValidationError("human judgments are not rectangular: generator '" + gen +
                            "' is judged on " + std::to_string(instances.size()) + " of " +
                            std::to_string(testset.size()) + " instances");
    }
  }
}

bool ScoreTensor::has(const std::string& metric_id, const std::string& generator_id) const {
  auto it = cells.find(metric_id);
  return it != cells.end() && it->second.count(generator_id) > 0;
}

const ScoreColumn& ScoreTensor::column(const std::string& metric_id,
                                       const std::string& generator_id) const {
  auto it = cells.find(metric_id);
  if (it != cells.end()) {
    auto jt = it->second.find(generator_id);
    if (jt != it->second.end()) return jt->second;
  }
  throw NotFoundError("no scores for metric '" + metric_id + "' on generator '" + generator_id +
                      "'");
}

double ScoreTensor::aggregate(const std::string& metric_id,
                              const std::string& generator_id) const {
  const auto& col = column(metric_id, generator_id);
  if (col.empty()) return 0.0;
  double s = 0.0;
  for (const auto& cell : col) s += cell.oriented;
  return s / static_cast<double>(col.size());
}

std::string join_tags(const std::vector<std::string>& tags) {
  std::string out;
  for (const auto& t : tags) out += t;
  return out;
}

Json to_json(const Instance& instance) {
  Json refs = Json::array();
  for (const auto& r : instance.references) refs.push_back({{"tag", r.tag}, {"text", r.text}});
  return {{"instance_id", instance.instance_id},
          {"source_text", instance.source_text},
          {"references", refs}};
}

namespace {

std::string default_tag(std::size_t index) {
  std::string tag;
  std::size_t n = index + 1;
  while (n > 0) {
    --n;
    tag.insert(tag.begin(), static_cast<char>('A' + n % 26));
    n /= 26;
  }
  return tag;
}

void require_utf8(const std::string& s, const std::string& what) {
  if (!text::is_valid_utf8(s)) throw ValidationError(what + " is not valid UTF-8");
}

}  // namespace

Instance instance_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("instance must be a JSON object");
  Instance inst;
  if (!j.contains("instance_id") || !j["instance_id"].is_string()) {
    throw ParseError("instance_id missing or not a string");
  }
  inst.instance_id = j["instance_id"].get<std::string>();
  if (j.contains("source_text") && !j["source_text"].is_null()) {
    if (!j["source_text"].is_string()) throw ParseError("source_text must be a string");
    inst.source_text = j["source_text"].get<std::string>();
  }
  if (!j.contains("references") || !j["references"].is_array()) {
    throw ParseError("references missing or not an array");
  }
  std::set<std::string> seen;
  const auto& refs = j["references"];
  for (std::size_t r = 0; r < refs.size(); ++r) {
    Reference ref;
    if (refs[r].is_string()) {
      ref.tag = default_tag(r);
      ref.text = refs[r].get<std::string>();
    } else if (refs[r].is_object() && refs[r].contains("text") && refs[r]["text"].is_string()) {
      ref.text = refs[r]["text"].get<std::string>();
      ref.tag = refs[r].contains("tag") ? refs[r]["tag"].get<std::string>() : default_tag(r);
    } else {
      throw ParseError("reference entries must be strings or {tag, text} objects");
    }
    if (ref.tag.empty()) throw ValidationError("reference tag must be non-empty");
    if (!seen.insert(ref.tag).second) {
      throw ValidationError("instance '" + inst.instance_id + "' repeats reference tag '" +
                            ref.tag + "'");
    }
    require_utf8(ref.text, "reference text");
    inst.references.push_back(std::move(ref));
  }
  require_utf8(inst.instance_id, "instance_id");
  require_utf8(inst.source_text, "source_text");
  if (inst.instance_id.empty()) throw ValidationError("instance_id must be non-empty");
  if (inst.references.empty()) {
    throw ValidationError("instance '" + inst.instance_id + "' has no references");
  }
  return inst;
}

Json to_json(const Executor& executor) {
  if (executor.is_builtin()) return {{"type", "builtin"}, {"name", executor.builtin_name}};
  return {{"type", "external"}, {"command", executor.command}};
}

Executor executor_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    constexpr std::string_view prefix = "builtin:";
    if (s.rfind(prefix, 0) == 0) return Executor::builtin(s.substr(prefix.size()));
    if (s.empty()) throw ValidationError("executor command is empty");
    return Executor::external({"/bin/sh", "-c", s});
  }
  if (!j.is_object()) throw ParseError("executor must be a string or an object");
  if (j.contains("builtin")) return Executor::builtin(j["builtin"].get<std::string>());
  const std::string type = j.value("type", j.contains("command") ? "external" : "builtin");
  if (type == "builtin") return Executor::builtin(j.value("name", std::string{}));
  if (type != "external") throw ValidationError("executor type must be builtin or external");
  if (!j.contains("command")) throw ParseError("external executor needs a command");
  const auto& cmd = j["command"];
  if (cmd.is_string()) return Executor::external({"/bin/sh", "-c", cmd.get<std::string>()});
  if (!cmd.is_array()) throw ParseError("executor command must be a string or an array");
  return Executor::external(cmd.get<std::vector<std::string>>());
}

Json to_json(const MetricSpec& spec) {
  return {{"metric_id", spec.metric_id},
          {"direction", to_string(spec.direction)},
          {"needs_references", spec.needs_references},
          {"needs_source", spec.needs_source},
          {"native_multi_ref", spec.native_multi_ref},
          {"executor", to_json(spec.executor)},
          {"timeout_seconds", spec.timeout_seconds},
          {"version_tag", spec.version_tag}};
}

MetricSpec metric_spec_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("metric spec must be a JSON object");
  MetricSpec spec;
  try {
    if (!j.contains("metric_id")) throw ParseError("metric spec lacks metric_id");
    spec.metric_id = j["metric_id"].get<std::string>();
    spec.direction = parse_direction(j.value("direction", "higher_better"));
    spec.needs_references = j.value("needs_references", true);
    spec.needs_source = j.value("needs_source", false);
    spec.native_multi_ref = j.value("native_multi_ref", false);
    if (!j.contains("executor")) throw ParseError("metric spec lacks executor");
    spec.executor = executor_from_json(j["executor"]);
    spec.timeout_seconds = j.value("timeout_seconds", 600.0);
    spec.version_tag = j.value("version_tag", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed metric spec: ") + e.what());
  }
  return spec;
}

Json to_json(const BoardConfig& config) {
  Json j{{"board_id", config.board_id},
         {"reference_tags", config.reference_tags},
         {"version", config.version},
         {"include_human_in_correlation", config.include_human_in_correlation},
         {"rubric_note", config.rubric_note}};
  if (config.mixed_effects) {
    j["mixed_effects"] = {{"evaluated_human", config.mixed_effects->evaluated_human},
                          {"reference_tags", config.mixed_effects->reference_tags}};
  }
  return j;
}

BoardConfig board_config_from_json(const Json& j) {
  BoardConfig config;
  try {
    config.board_id = j.at("board_id").get<std::string>();
    config.reference_tags = j.value("reference_tags", std::vector<std::string>{});
    config.version = j.value("version", 1L);
    config.include_human_in_correlation = j.value("include_human_in_correlation", true);
    config.rubric_note = j.value("rubric_note", std::string{});
    if (j.contains("mixed_effects") && !j["mixed_effects"].is_null()) {
      MixedEffectsConfig me;
      me.evaluated_human = j["mixed_effects"].value("evaluated_human", std::string{});
      me.reference_tags =
          j["mixed_effects"].value("reference_tags", std::vector<std::string>{});
      config.mixed_effects = me;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed board config: ") + e.what());
  }
  validate_identifier("board_id", config.board_id);
  return config;
}

Json generator_meta_to_json(const GeneratorSubmission& g) {
  return {{"generator_id", g.generator_id},
          {"kind", to_string(g.kind)},
          {"description", g.description},
          {"submitted_at", g.submitted_at}};
}

}  // namespace billboard
