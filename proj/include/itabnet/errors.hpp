// Copyright 2026 The itabnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace itabnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or argument values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input file or table does not have the expected columns.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A cell could not be parsed. Row is 1-based over data rows, column is the
// header name.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::string column)
      : Error(what), row_(row), column_(std::move(column)) {}
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

// Empty or otherwise unusable input.
class InputError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Labels outside the class range and similar data faults.
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite values. `step` is the decision step, or -1 when not applicable.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, int step = -1) : Error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace itabnet
