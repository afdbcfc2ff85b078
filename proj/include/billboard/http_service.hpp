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

#include <memory>
#include <string>

#include "billboard/datastore.hpp"

namespace billboard {

/// Parses the POST /api/v1/generators body
/// {generator_id, kind, description, outputs: [{instance_id, text}]}.
GeneratorSubmission generator_from_json(const Json& body);

/// HTTP front-end over one board. Recomputes run one at a time on a worker
/// thread; reads are served from the last published set of reports.
class Service {
 public:
  explicit Service(Board& board);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds to `port` (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void run();
  void stop();

  /// Queues a recompute and returns its job id.
  std::string enqueue_recompute();
  /// Blocks until no recompute is queued or running.
  void wait_idle();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace billboard
