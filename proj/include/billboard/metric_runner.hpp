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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "billboard/datastore.hpp"
#include "billboard/types.hpp"

namespace billboard {

inline constexpr int kProtocolVersion = 1;

struct ScoringRequest {
  std::string request_id;
  std::string candidate;
  std::vector<std::string> references;
  std::optional<std::string> source;
};

/// One plugin invocation. Responses must come back in request order.
struct ProtocolBatch {
  std::string metric_id;
  int protocol_version = kProtocolVersion;
  std::vector<ScoringRequest> requests;
};

/// Sign normalization so that higher always means better.
inline double orient(Direction direction, double raw) {
  return direction == Direction::lower_better ? -raw : raw;
}
std::vector<double> orient(const MetricSpec& spec, std::span<const double> raw);

/// One stdin line of protocol v1 (no trailing newline).
std::string encode_request(const ScoringRequest& request);
/// Parses "<id>\t<score>" lines against the batch; throws ScoringError.
std::vector<double> parse_responses(const ProtocolBatch& batch, const std::string& output,
                                    const std::string& diagnostics = {});

std::vector<double> run_external(const MetricSpec& spec, const ProtocolBatch& batch);

/// Raw score for one candidate. Non-native multi-reference metrics are called
/// once per reference and the best oriented score is kept.
double score_one(const MetricSpec& spec, const ScoringRequest& request);

/// Raw scores for every instance in test-set order, references restricted to
/// `tags` (all references when empty). One plugin process per call.
std::vector<double> score_generator(const MetricSpec& spec, const GeneratorSubmission& generator,
                                    const TestSet& testset, const std::vector<std::string>& tags);

ScoreColumn make_column(const MetricSpec& spec, std::span<const double> raw);

/// Scores one probe instance (its first reference as candidate) within the
/// metric's timeout; throws ScoringError with the captured diagnostics.
void smoke_test(const MetricSpec& spec, const TestSet& testset,
                const std::vector<std::string>& tags);

/// Validates, smoke-tests and persists a metric submission.
Receipt submit_metric(Board& board, MetricSpec spec);

}  // namespace billboard
