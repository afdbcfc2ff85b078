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

#include "billboard/datastore.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "billboard/errors.hpp"
#include "billboard/text.hpp"

namespace fs = std::filesystem;

namespace billboard {

// ---------------------------------------------------------------------------
// Snapshot helpers

std::vector<std::string> Snapshot::scoring_tags() const {
  return config.reference_tags.empty() ? testset.reference_tags() : config.reference_tags;
}

std::optional<std::vector<std::string>> Snapshot::restricted_tags() const {
  if (!config.mixed_effects || config.mixed_effects->reference_tags.empty()) return std::nullopt;
  return config.mixed_effects->reference_tags;
}

bool Snapshot::needs_restricted_column(const MetricRecord& metric) const {
  const auto tags = restricted_tags();
  return tags && metric.spec.needs_references && *tags != scoring_tags();
}

const ScoreColumn& Snapshot::analysis_column(const std::string& metric_id,
                                             const std::string& generator_id) const {
  auto it = metrics.find(metric_id);
  if (it != metrics.end() && needs_restricted_column(it->second)) {
    return restricted_scores.column(metric_id, generator_id);
  }
  return scores.column(metric_id, generator_id);
}

std::vector<std::string> Snapshot::active_metric_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, rec] : metrics) {
    if (rec.status == MetricStatus::active) ids.push_back(id);
  }
  return ids;
}

std::vector<std::string> Snapshot::annotated_generator_ids() const {
  std::vector<std::string> ids;
  for (const auto& id : judgments.annotated_generators()) {
    if (generators.count(id)) ids.push_back(id);
  }
  return ids;
}

std::vector<PendingCell> Snapshot::pending_cells() const {
  std::vector<PendingCell> out;
  for (const auto& metric_id : active_metric_ids()) {
    const auto& rec = metrics.at(metric_id);
    for (const auto& [gen_id, gen] : generators) {
      if (!scores.has(metric_id, gen_id)) out.push_back({metric_id, gen_id, TensorKind::main});
      if (needs_restricted_column(rec) && !restricted_scores.has(metric_id, gen_id)) {
        out.push_back({metric_id, gen_id, TensorKind::restricted});
      }
    }
  }
  return out;
}

std::string Snapshot::latest_submission_time() const {
  std::string latest;
  for (const auto& [id, g] : generators) latest = std::max(latest, g.submitted_at);
  for (const auto& [id, m] : metrics) latest = std::max(latest, m.submitted_at);
  return latest;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

Json column_to_json(const ScoreColumn& col) {
  Json arr = Json::array();
  for (const auto& c : col) arr.push_back({c.raw, c.oriented});
  return arr;
}

ScoreColumn column_from_json(const Json& arr) {
  ScoreColumn col;
  for (const auto& pair : arr) col.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
  return col;
}

Json tensor_to_json(const ScoreTensor& t) {
  Json j = Json::object();
  for (const auto& [m, by_gen] : t.cells) {
    for (const auto& [g, col] : by_gen) j[m][g] = column_to_json(col);
  }
  return j;
}

ScoreTensor tensor_from_json(const Json& j) {
  ScoreTensor t;
  for (const auto& [m, by_gen] : j.items()) {
    for (const auto& [g, col] : by_gen.items()) t.cells[m][g] = column_from_json(col);
  }
  return t;
}

Json metric_record_to_json(const MetricRecord& rec) {
  Json j = to_json(rec.spec);
  j["status"] = to_string(rec.status);
  j["diagnostic"] = rec.diagnostic;
  j["submitted_at"] = rec.submitted_at;
  return j;
}

MetricRecord metric_record_from_json(const Json& j) {
  MetricRecord rec;
  rec.spec = metric_spec_from_json(j);
  rec.status = j.value("status", "active") == "rejected" ? MetricStatus::rejected
                                                         : MetricStatus::active;
  rec.diagnostic = j.value("diagnostic", std::string{});
  rec.submitted_at = j.value("submitted_at", std::string{});
  return rec;
}

GeneratorSubmission generator_from_meta(const Json& meta) {
  GeneratorSubmission g;
  g.generator_id = meta.at("generator_id").get<std::string>();
  g.kind = parse_generator_kind(meta.at("kind").get<std::string>());
  g.description = meta.value("description", std::string{});
  g.submitted_at = meta.value("submitted_at", std::string{});
  return g;
}

}  // namespace

Json snapshot_to_json(const Snapshot& s) {
  Json instances = Json::array();
  for (const auto& inst : s.testset.instances()) instances.push_back(to_json(inst));
  Json generators = Json::object();
  for (const auto& [id, g] : s.generators) {
    Json meta = generator_meta_to_json(g);
    meta["outputs"] = g.outputs;
    generators[id] = meta;
  }
  Json metrics = Json::object();
  for (const auto& [id, m] : s.metrics) metrics[id] = metric_record_to_json(m);
  Json judgments = Json::array();
  for (const auto& [key, score] : s.judgments.entries) {
    judgments.push_back({key.first, key.second, score});
  }
  return {{"config", to_json(s.config)},
          {"testset", instances},
          {"generators", generators},
          {"metrics", metrics},
          {"judgments", judgments},
          {"scores", tensor_to_json(s.scores)},
          {"restricted_scores", tensor_to_json(s.restricted_scores)}};
}

Snapshot snapshot_from_json(const Json& j) {
  try {
    Snapshot s;
    s.config = board_config_from_json(j.at("config"));
    std::vector<Instance> instances;
    for (const auto& inst : j.at("testset")) instances.push_back(instance_from_json(inst));
    s.testset = TestSet(std::move(instances));
    for (const auto& [id, meta] : j.at("generators").items()) {
      GeneratorSubmission g = generator_from_meta(meta);
      g.outputs = meta.at("outputs").get<std::map<std::string, std::string>>();
      s.generators.emplace(id, std::move(g));
    }
    for (const auto& [id, meta] : j.at("metrics").items()) {
      s.metrics.emplace(id, metric_record_from_json(meta));
    }
    for (const auto& row : j.at("judgments")) {
      s.judgments.entries[{row.at(0).get<std::string>(), row.at(1).get<std::string>()}] =
          row.at(2).get<double>();
    }
    s.judgments.rubric_note = s.config.rubric_note;
    s.scores = tensor_from_json(j.at("scores"));
    s.restricted_scores = tensor_from_json(j.at("restricted_scores"));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed snapshot: ") + e.what());
  }
}

std::string serialize(const Snapshot& snapshot) { return snapshot_to_json(snapshot).dump(); }

Snapshot deserialize(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("snapshot is not valid JSON: ") + e.what());
  }
  return snapshot_from_json(j);
}

// ---------------------------------------------------------------------------
// File helpers

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw Error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

namespace {

/// Calls fn(line_number, json) for every non-blank line.
template <typename Fn>
void for_each_jsonl(const fs::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.filename().string() + ": line " + std::to_string(line_no) +
                       ": invalid JSON (" + e.what() + ")");
    }
    fn(line_no, j);
  }
}

std::string jsonl(const std::vector<Json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

TestSet load_testset(const fs::path& path) {
  std::vector<Instance> instances;
  std::map<std::string, std::size_t> first_line;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& j) {
    Instance inst;
    try {
      inst = instance_from_json(j);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    auto [it, inserted] = first_line.emplace(inst.instance_id, line_no);
    if (!inserted) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate instance_id '" +
                            inst.instance_id + "' (first seen on line " +
                            std::to_string(it->second) + ")");
    }
    instances.push_back(std::move(inst));
  });
  return TestSet(std::move(instances));
}

HumanJudgments load_judgments(const fs::path& path, const TestSet& testset) {
  HumanJudgments h;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& j) {
    try {
      const auto gen = j.at("generator_id").get<std::string>();
      const auto inst = j.at("instance_id").get<std::string>();
      const double score = j.at("score").get<double>();
      validate_identifier("generator_id", gen);
      if (!h.entries.emplace(std::make_pair(gen, inst), score).second) {
        throw ValidationError("line " + std::to_string(line_no) + ": duplicate judgment for (" +
                              gen + ", " + inst + ")");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  h.validate(testset);
  return h;
}

std::map<std::string, std::string> parse_outputs(const Json& array) {
  if (!array.is_array()) throw ParseError("outputs must be an array of {instance_id, text}");
  std::map<std::string, std::string> out;
  for (const auto& row : array) {
    std::string id;
    std::string textv;
    try {
      id = row.at("instance_id").get<std::string>();
      textv = row.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed output entry: ") + e.what());
    }
    if (!out.emplace(id, std::move(textv)).second) {
      throw ValidationError("instance '" + id + "' appears more than once in outputs");
    }
  }
  return out;
}

std::map<std::string, std::string> load_outputs(const fs::path& path) {
  std::map<std::string, std::string> out;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& j) {
    try {
      const auto id = j.at("instance_id").get<std::string>();
      if (!out.emplace(id, j.at("text").get<std::string>()).second) {
        throw ValidationError("line " + std::to_string(line_no) + ": instance '" + id +
                              "' appears more than once");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return out;
}

std::string system_timestamp() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Clock fixed_clock(std::string timestamp) {
  return [timestamp = std::move(timestamp)] { return timestamp; };
}

BoardLock::BoardLock(const fs::path& board_dir) {
  const fs::path lock_path = board_dir / ".lock";
  fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error("cannot open lock file '" + lock_path.string() + "'");
  if (::flock(fd_, LOCK_EX) != 0) {
    ::close(fd_);
    throw Error("cannot lock '" + lock_path.string() + "'");
  }
}

BoardLock::~BoardLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

// ---------------------------------------------------------------------------
// Board

struct Board::Impl {
  fs::path root;
  Clock clock;
  mutable std::mutex mu;
  Snapshot state;
  mutable SnapshotPtr published;

  fs::path score_path(const std::string& metric, const std::string& gen, TensorKind kind) const {
    if (kind == TensorKind::main) return root / "scores" / metric / (gen + ".jsonl");
    const auto tags = state.restricted_tags();
    return root / ("scores-refs." + join_tags(tags.value_or(std::vector<std::string>{}))) /
           metric / (gen + ".jsonl");
  }

  void write_config() { write_file_atomic(root / "board.json", pretty(to_json(state.config))); }

  void bump_version() {
    ++state.config.version;
    write_config();
  }

  void write_score_file(const std::string& metric, const std::string& gen, TensorKind kind,
                        const ScoreColumn& col) {
    std::vector<Json> rows;
    for (std::size_t k = 0; k < col.size(); ++k) {
      rows.push_back({{"instance_id", state.testset.at(k).instance_id},
                      {"raw", col[k].raw},
                      {"oriented", col[k].oriented}});
    }
    write_file_atomic(score_path(metric, gen, kind), jsonl(rows));
  }

  ScoreColumn read_score_file(const fs::path& path) const {
    ScoreColumn col;
    for_each_jsonl(path, [&](std::size_t line_no, const Json& j) {
      const auto k = col.size();
      if (k >= state.testset.size() ||
          j.at("instance_id").get<std::string>() != state.testset.at(k).instance_id) {
        throw ValidationError(path.string() + ": line " + std::to_string(line_no) +
                              " is out of test-set order");
      }
      col.push_back({j.at("raw").get<double>(), j.at("oriented").get<double>()});
    });
    if (col.size() != state.testset.size()) {
      throw ValidationError(path.string() + ": expected " + std::to_string(state.testset.size()) +
                            " scores, found " + std::to_string(col.size()));
    }
    return col;
  }

  void load_scores(TensorKind kind) {
    ScoreTensor& tensor = kind == TensorKind::main ? state.scores : state.restricted_scores;
    for (const auto& [metric_id, rec] : state.metrics) {
      if (rec.status != MetricStatus::active) continue;
      if (kind == TensorKind::restricted && !state.needs_restricted_column(rec)) continue;
      for (const auto& [gen_id, g] : state.generators) {
        const fs::path p = score_path(metric_id, gen_id, kind);
        if (fs::exists(p)) tensor.cells[metric_id][gen_id] = read_score_file(p);
      }
    }
  }

  void publish_reset() { published.reset(); }
};

Board::Board(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Board::Board(Board&&) noexcept = default;
Board& Board::operator=(Board&&) noexcept = default;
Board::~Board() = default;

const fs::path& Board::root() const { return impl_->root; }

Board Board::create(const fs::path& dir, BoardConfig config, TestSet testset,
                    HumanJudgments judgments, Clock clock) {
  validate_identifier("board_id", config.board_id);
  if (testset.empty()) throw ValidationError("test set is empty");
  judgments.validate(testset);
  const auto tags = testset.reference_tags();
  auto check_tags = [&](const std::vector<std::string>& wanted, const char* what) {
    for (const auto& t : wanted) {
      if (std::find(tags.begin(), tags.end(), t) == tags.end()) {
        throw ValidationError(std::string(what) + " tag '" + t + "' does not occur in the test set");
      }
    }
  };
  check_tags(config.reference_tags, "reference");
  if (config.mixed_effects) check_tags(config.mixed_effects->reference_tags, "mixed-effects reference");
  if (fs::exists(dir / "board.json")) {
    throw DuplicateError("a board already exists at '" + dir.string() + "'");
  }

  auto impl = std::make_unique<Impl>();
  impl->root = dir;
  impl->clock = std::move(clock);
  config.version = 1;
  config.rubric_note = judgments.rubric_note.empty() ? config.rubric_note : judgments.rubric_note;
  judgments.rubric_note = config.rubric_note;
  impl->state.config = std::move(config);
  impl->state.testset = std::move(testset);
  impl->state.judgments = std::move(judgments);

  fs::create_directories(dir);
  for (const char* sub : {"generators", "metrics", "scores", "ensembles", "reports"}) {
    fs::create_directories(dir / sub);
  }
  std::vector<Json> rows;
  for (const auto& inst : impl->state.testset.instances()) rows.push_back(to_json(inst));
  write_file_atomic(dir / "testset.jsonl", jsonl(rows));
  rows.clear();
  // Judgments in (generator, test-set order).
  for (const auto& gen : impl->state.judgments.annotated_generators()) {
    for (const auto& inst : impl->state.testset.instances()) {
      rows.push_back({{"generator_id", gen},
                      {"instance_id", inst.instance_id},
                      {"score", impl->state.judgments.score(gen, inst.instance_id)}});
    }
  }
  write_file_atomic(dir / "human_judgments.jsonl", jsonl(rows));
  impl->write_config();
  return Board(std::move(impl));
}

Board Board::open(const fs::path& dir, Clock clock) {
  if (!fs::exists(dir / "board.json")) {
    throw NotFoundError("no board at '" + dir.string() + "' (missing board.json); run init first");
  }
  auto impl = std::make_unique<Impl>();
  impl->root = dir;
  impl->clock = std::move(clock);
  Snapshot& s = impl->state;
  try {
    s.config = board_config_from_json(Json::parse(read_file(dir / "board.json")));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("board.json: ") + e.what());
  }
  s.testset = load_testset(dir / "testset.jsonl");
  if (fs::exists(dir / "human_judgments.jsonl")) {
    s.judgments = load_judgments(dir / "human_judgments.jsonl", s.testset);
  }
  s.judgments.rubric_note = s.config.rubric_note;

  if (fs::exists(dir / "generators")) {
    for (const auto& entry : fs::directory_iterator(dir / "generators")) {
      if (!entry.is_directory()) continue;
      GeneratorSubmission g =
          generator_from_meta(Json::parse(read_file(entry.path() / "meta.json")));
      g.outputs = load_outputs(entry.path() / "outputs.jsonl");
      s.generators.emplace(g.generator_id, std::move(g));
    }
  }
  if (fs::exists(dir / "metrics")) {
    for (const auto& entry : fs::directory_iterator(dir / "metrics")) {
      if (!entry.is_directory()) continue;
      MetricRecord rec = metric_record_from_json(Json::parse(read_file(entry.path() / "meta.json")));
      s.metrics.emplace(rec.spec.metric_id, std::move(rec));
    }
  }
  impl->load_scores(TensorKind::main);
  impl->load_scores(TensorKind::restricted);
  return Board(std::move(impl));
}

Receipt Board::add_generator(GeneratorSubmission submission) {
  std::lock_guard lock(impl_->mu);
  Snapshot& s = impl_->state;
  validate_identifier("generator_id", submission.generator_id);
  if (s.generators.count(submission.generator_id)) {
    throw DuplicateError("generator '" + submission.generator_id + "' already exists");
  }
  std::vector<std::string> missing;
  for (const auto& inst : s.testset.instances()) {
    if (!submission.outputs.count(inst.instance_id)) missing.push_back(inst.instance_id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ValidationError("generator '" + submission.generator_id +
                          "' is missing outputs for instances: " + list);
  }
  for (const auto& [id, textv] : submission.outputs) {
    if (!s.testset.index_of(id)) {
      throw ValidationError("generator '" + submission.generator_id +
                            "' has an output for unknown instance '" + id + "'");
    }
    if (!text::is_valid_utf8(textv)) {
      throw ValidationError("output for instance '" + id + "' is not valid UTF-8");
    }
  }
  submission.submitted_at = impl_->clock();

  const fs::path gdir = impl_->root / "generators" / submission.generator_id;
  std::vector<Json> rows;
  for (const auto& inst : s.testset.instances()) {
    rows.push_back({{"instance_id", inst.instance_id}, {"text", submission.outputs.at(inst.instance_id)}});
  }
  write_file_atomic(gdir / "outputs.jsonl", jsonl(rows));
  write_file_atomic(gdir / "meta.json", pretty(generator_meta_to_json(submission)));

  Receipt receipt{submission.generator_id, submission.submitted_at, 0};
  s.generators.emplace(submission.generator_id, std::move(submission));
  impl_->bump_version();
  receipt.version = s.config.version;
  impl_->publish_reset();
  return receipt;
}

Receipt Board::add_metric(MetricSpec spec) {
  std::lock_guard lock(impl_->mu);
  Snapshot& s = impl_->state;
  spec.validate();
  if (s.metrics.count(spec.metric_id)) {
    throw DuplicateError("metric '" + spec.metric_id + "' already exists");
  }
  MetricRecord rec;
  rec.spec = std::move(spec);
  rec.submitted_at = impl_->clock();
  const std::string id = rec.spec.metric_id;
  write_file_atomic(impl_->root / "metrics" / id / "meta.json", pretty(metric_record_to_json(rec)));
  Receipt receipt{id, rec.submitted_at, 0};
  s.metrics.emplace(id, std::move(rec));
  impl_->bump_version();
  receipt.version = s.config.version;
  impl_->publish_reset();
  return receipt;
}

void Board::store_scores(const std::string& metric_id, const std::string& generator_id,
                         ScoreColumn column, TensorKind tensor) {
  std::lock_guard lock(impl_->mu);
  Snapshot& s = impl_->state;
  auto mit = s.metrics.find(metric_id);
  if (mit == s.metrics.end() || mit->second.status != MetricStatus::active) {
    throw NotFoundError("no active metric '" + metric_id + "'");
  }
  if (!s.generators.count(generator_id)) throw NotFoundError("no generator '" + generator_id + "'");
  if (column.size() != s.testset.size()) {
    throw ValidationError("score column for (" + metric_id + ", " + generator_id + ") has " +
                          std::to_string(column.size()) + " cells, expected " +
                          std::to_string(s.testset.size()));
  }
  for (const auto& c : column) {
    if (!std::isfinite(c.raw) || !std::isfinite(c.oriented)) {
      throw ValidationError("non-finite score for (" + metric_id + ", " + generator_id + ")");
    }
  }
  impl_->write_score_file(metric_id, generator_id, tensor, column);
  auto& target = tensor == TensorKind::main ? s.scores : s.restricted_scores;
  target.cells[metric_id][generator_id] = std::move(column);
  impl_->publish_reset();
}

void Board::reject_metric(const std::string& metric_id, const std::string& diagnostic) {
  std::lock_guard lock(impl_->mu);
  Snapshot& s = impl_->state;
  auto it = s.metrics.find(metric_id);
  if (it == s.metrics.end()) throw NotFoundError("no metric '" + metric_id + "'");
  it->second.status = MetricStatus::rejected;
  it->second.diagnostic = diagnostic;
  write_file_atomic(impl_->root / "metrics" / metric_id / "meta.json",
                    pretty(metric_record_to_json(it->second)));
  std::error_code ec;
  fs::remove_all(impl_->root / "scores" / metric_id, ec);
  if (const auto tags = s.restricted_tags()) {
    fs::remove_all(impl_->root / ("scores-refs." + join_tags(*tags)) / metric_id, ec);
  }
  s.scores.cells.erase(metric_id);
  s.restricted_scores.cells.erase(metric_id);
  impl_->publish_reset();
}

SnapshotPtr Board::snapshot() const {
  std::lock_guard lock(impl_->mu);
  if (!impl_->published) impl_->published = std::make_shared<const Snapshot>(impl_->state);
  return impl_->published;
}

bool Board::write_artifact(const fs::path& relative, const std::string& content) {
  std::lock_guard lock(impl_->mu);
  const fs::path p = impl_->root / relative;
  if (fs::exists(p) && read_file(p) == content) return false;
  write_file_atomic(p, content);
  return true;
}

std::optional<std::string> Board::read_artifact(const fs::path& relative) const {
  const fs::path p = impl_->root / relative;
  if (!fs::exists(p)) return std::nullopt;
  return read_file(p);
}

}  // namespace billboard
