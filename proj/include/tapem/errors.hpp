// Copyright 2026 The tapem Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace tapem {

// Every error carries the process exit code the CLI maps it to:
// 1 usage/config, 2 data integrity, 3 numeric failure.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, int exit_code)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what, 1) {}
};

struct ParseError : Error {
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what, 2), line(line) {}
  std::size_t line;
};

struct IntegrityError : Error {
  explicit IntegrityError(const std::string& what) : Error(what, 2) {}
};

struct LookupError : Error {
  explicit LookupError(const std::string& what) : Error(what, 2) {}
};

struct TypeError : Error {
  explicit TypeError(const std::string& what) : Error(what, 2) {}
};

struct InputError : Error {
  explicit InputError(const std::string& what) : Error(what, 1) {}
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& what) : Error(what, 3) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(what, 3) {}
};

struct ContractViolation : Error {
  explicit ContractViolation(const std::string& what) : Error(what, 3) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(what, 1) {}
};

}  // namespace tapem
