/*
 * Copyright 2026 The alab Authors.
 *
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

#ifndef ALAB_ERRORS_HPP_
#define ALAB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace alab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Feature vector or matrix has the wrong dimension.
class InputShapeError : public Error {
 public:
  using Error::Error;
};

// Empty or malformed training batch.
class InvalidBatchError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss, non positive-definite covariance, and similar.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

// A noisy oracle was asked to flip a label but no other label exists.
class NoValidFlipError : public Error {
 public:
  using Error::Error;
};

// Metric is undefined for the given labels (e.g. AUC with a single class).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Score history points are not strictly increasing at spacing dt.
class HistoryOrderError : public Error {
 public:
  using Error::Error;
};

// Dataset cannot be split into the requested parts.
class SplitError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace alab

#endif  // ALAB_ERRORS_HPP_
