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

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace billboard {

struct ProcessResult {
  bool launched = false;
  bool timed_out = false;
  int exit_code = -1;  // valid when the child exited normally
  int term_signal = 0;
  std::string stdout_text;
  std::string stderr_text;
  std::string launch_error;

  bool succeeded() const { return launched && !timed_out && term_signal == 0 && exit_code == 0; }
};

/// Runs argv[0] (PATH lookup) in its own process group, feeding `input` on
/// stdin and capturing stdout/stderr. The whole group is killed at the deadline.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          std::chrono::milliseconds timeout,
                          const std::vector<std::pair<std::string, std::string>>& env = {});

}  // namespace billboard
