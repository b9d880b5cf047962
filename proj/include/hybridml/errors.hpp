/*
 * Copyright 2026 The HybridML Authors.
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

#ifndef HYBRIDML_ERRORS_HPP_
#define HYBRIDML_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hybridml {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes (config = 1, data = 2, model = 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration: bad hyperparameter ranges, mtry > p, bad flags.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// --- data errors ---

class DataError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class InputError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t row, const std::string& what)
      : DataError("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class StratificationError : public DataError {
 public:
  using DataError::DataError;
};

class LeakageError : public DataError {
 public:
  using DataError::DataError;
};

// --- model errors ---

class ModelError : public Error {
 public:
  using Error::Error;
};

// Raised when a penalized fit keeps no feature at all.
class SelectionError : public ModelError {
 public:
  using ModelError::ModelError;
};

// A metric is 0/0 or otherwise undefined (e.g. AUC with one class).
class UndefinedMetricError : public ModelError {
 public:
  using ModelError::ModelError;
};

class SearchError : public ModelError {
 public:
  using ModelError::ModelError;
};

}  // namespace hybridml

#endif  // HYBRIDML_ERRORS_HPP_
