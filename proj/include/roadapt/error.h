// Copyright 2026 The roadapt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ROADAPT_ERROR_H_
#define ROADAPT_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace roadapt {

// Base of every error raised by the library. The CLI maps Validation errors
// to exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed config, bad arguments, out-of-range scores.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Tensor shape disagreement. `axis` names the offending axis ("rows",
// "channels", "kernel", ...).
class DimensionError : public Error {
 public:
  DimensionError(std::string op, std::string axis, std::size_t expected,
                 std::size_t actual)
      : Error(op + ": dimension mismatch on axis '" + axis + "' (expected " +
              std::to_string(expected) + ", got " + std::to_string(actual) +
              ")"),
        op_(std::move(op)),
        axis_(std::move(axis)),
        expected_(expected),
        actual_(actual) {}

  const std::string& op() const { return op_; }
  const std::string& axis() const { return axis_; }
  std::size_t expected() const { return expected_; }
  std::size_t actual() const { return actual_; }

 private:
  std::string op_;
  std::string axis_;
  std::size_t expected_;
  std::size_t actual_;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Numerical failure during training or checking (NaN/Inf).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace roadapt

#endif  // ROADAPT_ERROR_H_
