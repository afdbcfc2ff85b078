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

#include "billboard/metric_runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "billboard/builtin_metrics.hpp"
#include "billboard/errors.hpp"
#include "billboard/subprocess.hpp"

namespace billboard {
namespace {

std::string tail(const std::string& s, std::size_t max = 4000) {
  return s.size() <= max ? s : "..." + s.substr(s.size() - max);
}

std::string diagnostics_of(const ProcessResult& r) {
  std::string d;
  if (!r.launch_error.empty()) d += r.launch_error + "\n";
  if (!r.stderr_text.empty()) d += "stderr:\n" + tail(r.stderr_text);
  return d;
}

/// Strips the per-reference suffix used for non-native multi-reference batches.
std::string instance_of(const std::string& request_id) {
  auto hash = request_id.rfind('#');
  return hash == std::string::npos ? request_id : request_id.substr(0, hash);
}

double builtin_score(const MetricSpec& spec, const ScoringRequest& request) {
  const auto* metric = metrics::find_builtin(spec.executor.builtin_name);
  if (metric == nullptr) throw ScoringError("unknown builtin '" + spec.executor.builtin_name + "'");
  return metric->score(request.candidate, request.references);
}

/// Expands requests into single-reference requests when the engine applies the max rule.
struct Expansion {
  ProtocolBatch batch;
  std::vector<std::size_t> owner;  // batch request -> original request
};

bool engine_max_rule(const MetricSpec& spec) {
  return spec.needs_references && !spec.native_multi_ref;
}

Expansion expand(const MetricSpec& spec, std::span<const ScoringRequest> requests) {
  Expansion e;
  e.batch.metric_id = spec.metric_id;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& req = requests[i];
    if (!engine_max_rule(spec) || req.references.size() <= 1) {
      e.batch.requests.push_back(req);
      e.owner.push_back(i);
      continue;
    }
    for (std::size_t r = 0; r < req.references.size(); ++r) {
      ScoringRequest single = req;
      single.request_id = req.request_id + "#" + std::to_string(r);
      single.references = {req.references[r]};
      e.batch.requests.push_back(std::move(single));
      e.owner.push_back(i);
    }
  }
  return e;
}

/// Max over oriented values, reported back on the raw scale.
std::vector<double> collapse(const MetricSpec& spec, const Expansion& e,
                             std::span<const double> raw, std::size_t n) {
  std::vector<double> best(n, -INFINITY);
  for (std::size_t b = 0; b < raw.size(); ++b) {
    best[e.owner[b]] = std::max(best[e.owner[b]], orient(spec.direction, raw[b]));
  }
  for (double& v : best) v = orient(spec.direction, v);
  return best;
}

std::vector<double> score_requests(const MetricSpec& spec,
                                   std::span<const ScoringRequest> requests) {
  const Expansion e = expand(spec, requests);
  std::vector<double> raw;
  if (spec.executor.is_builtin()) {
    raw.reserve(e.batch.requests.size());
    for (const auto& req : e.batch.requests) raw.push_back(builtin_score(spec, req));
  } else {
    raw = run_external(spec, e.batch);
  }
  return collapse(spec, e, raw, requests.size());
}

ScoringRequest request_for(const MetricSpec& spec, const std::string& id,
                           const std::string& candidate, const Instance& inst,
                           const std::vector<std::string>& tags) {
  ScoringRequest req;
  req.request_id = id;
  req.candidate = candidate;
  if (spec.needs_references) {
    req.references = inst.reference_texts(tags);
    if (req.references.empty()) {
      throw ScoringError("instance '" + inst.instance_id + "' has no references with tags '" +
                         join_tags(tags) + "'");
    }
  }
  if (spec.needs_source) req.source = inst.source_text;
  return req;
}

}  // namespace

std::vector<double> orient(const MetricSpec& spec, std::span<const double> raw) {
  std::vector<double> out(raw.size());
  std::transform(raw.begin(), raw.end(), out.begin(),
                 [&](double v) { return orient(spec.direction, v); });
  return out;
}

std::string encode_request(const ScoringRequest& request) {
  Json j{{"id", request.request_id},
         {"candidate", request.candidate},
         {"references", request.references},
         {"source", request.source ? Json(*request.source) : Json(nullptr)}};
  return j.dump();
}

std::vector<double> parse_responses(const ProtocolBatch& batch, const std::string& output,
                                    const std::string& diagnostics) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < output.size()) {
    auto nl = output.find('\n', pos);
    if (nl == std::string::npos) nl = output.size();
    std::string line = output.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = nl + 1;
  }
  if (lines.size() != batch.requests.size()) {
    throw ScoringError("metric '" + batch.metric_id + "' returned " + std::to_string(lines.size()) +
                           " lines for " + std::to_string(batch.requests.size()) + " requests",
                       diagnostics);
  }
  std::vector<double> scores;
  scores.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const std::string& expected = batch.requests[i].request_id;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ScoringError("metric '" + batch.metric_id + "': response " + std::to_string(i + 1) +
                             " is not '<id>\\t<score>': '" + line + "'",
                         diagnostics);
    }
    if (line.compare(0, tab, expected) != 0 || tab != expected.size()) {
      throw ScoringError("metric '" + batch.metric_id + "': response " + std::to_string(i + 1) +
                             " has id '" + line.substr(0, tab) + "', expected '" + expected + "'",
                         diagnostics);
    }
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
      throw ScoringError("metric '" + batch.metric_id + "': unparsable score '" +
                             std::string(first, last) + "' for request '" + expected + "'",
                         diagnostics);
    }
    scores.push_back(value);
  }
  return scores;
}

std::vector<double> run_external(const MetricSpec& spec, const ProtocolBatch& batch) {
  if (batch.requests.empty()) throw ScoringError("empty scoring batch for '" + spec.metric_id + "'");
  std::string input;
  for (const auto& req : batch.requests) {
    input += encode_request(req);
    input += '\n';
  }
  const auto timeout = std::chrono::milliseconds(
      static_cast<long long>(std::ceil(spec.timeout_seconds * 1000.0)));
  const ProcessResult r =
      run_process(spec.executor.command, input, timeout,
                  {{"BILLBOARD_PROTOCOL_VERSION", std::to_string(batch.protocol_version)}});
  const std::string diag = diagnostics_of(r);
  if (!r.launched) throw ScoringError("metric '" + spec.metric_id + "' could not start", diag);
  if (r.timed_out) {
    const auto done = static_cast<std::size_t>(
        std::count(r.stdout_text.begin(), r.stdout_text.end(), '\n'));
    const std::string where =
        done < batch.requests.size()
            ? " while scoring instance '" + instance_of(batch.requests[done].request_id) + "'"
            : " after writing all responses";
    throw ScoringError("metric '" + spec.metric_id + "' timed out after " +
                           std::to_string(spec.timeout_seconds) + " s" + where,
                       diag);
  }
  if (r.term_signal != 0) {
    throw ScoringError("metric '" + spec.metric_id + "' killed by signal " +
                           std::to_string(r.term_signal),
                       diag);
  }
  if (r.exit_code != 0) {
    throw ScoringError(
        "metric '" + spec.metric_id + "' exited with status " + std::to_string(r.exit_code), diag);
  }
  return parse_responses(batch, r.stdout_text, diag);
}

double score_one(const MetricSpec& spec, const ScoringRequest& request) {
  return score_requests(spec, std::span<const ScoringRequest>(&request, 1)).front();
}

std::vector<double> score_generator(const MetricSpec& spec, const GeneratorSubmission& generator,
                                    const TestSet& testset, const std::vector<std::string>& tags) {
  std::vector<ScoringRequest> requests;
  requests.reserve(testset.size());
  for (const auto& inst : testset.instances()) {
    auto it = generator.outputs.find(inst.instance_id);
    if (it == generator.outputs.end()) {
      throw ScoringError("generator '" + generator.generator_id + "' has no output for '" +
                         inst.instance_id + "'");
    }
    requests.push_back(request_for(spec, inst.instance_id, it->second, inst, tags));
  }
  return score_requests(spec, requests);
}

ScoreColumn make_column(const MetricSpec& spec, std::span<const double> raw) {
  ScoreColumn col(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) col[k] = {raw[k], orient(spec.direction, raw[k])};
  return col;
}

void smoke_test(const MetricSpec& spec, const TestSet& testset,
                const std::vector<std::string>& tags) {
  if (testset.empty()) throw ValidationError("cannot smoke-test against an empty test set");
  const Instance& probe = testset.at(0);
  const auto refs = probe.reference_texts(tags);
  const std::string candidate = refs.empty() ? probe.references.front().text : refs.front();
  const double v = score_one(spec, request_for(spec, "probe", candidate, probe, tags));
  if (!std::isfinite(v)) throw ScoringError("smoke test produced a non-finite score");
}

Receipt submit_metric(Board& board, MetricSpec spec) {
  spec.validate();
  const auto snap = board.snapshot();
  if (snap->metrics.count(spec.metric_id)) {
    throw DuplicateError("metric '" + spec.metric_id + "' already exists");
  }
  if (!spec.executor.is_builtin()) {
    try {
      smoke_test(spec, snap->testset, snap->scoring_tags());
    } catch (const ScoringError& e) {
      throw ScoringError(std::string("smoke test failed: ") + e.what(), e.diagnostics());
    }
  }
  return board.add_metric(std::move(spec));
}

}  // namespace billboard
