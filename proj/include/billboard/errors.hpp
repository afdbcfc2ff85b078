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

#include <stdexcept>
#include <string>

namespace billboard {

/// Base class for all errors raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input could not be parsed (bad JSON, bad line).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A submission reuses an existing identifier.
class DuplicateError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// A metric failed to produce a score (process failure, timeout, bad output).
class ScoringError : public Error {
 public:
  ScoringError(const std::string& what, std::string diagnostics = {})
      : Error(what), diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

/// A vector has zero variance where a non-degenerate one is required.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_change)
      : Error(what), last_change_(last_change) {}
  double last_change() const noexcept { return last_change_; }

 private:
  double last_change_;
};

/// Numerical failure inside a fit (singular design, non-finite criterion).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace billboard
