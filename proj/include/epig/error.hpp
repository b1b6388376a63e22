// Copyright 2026 The epig Authors.
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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace epig {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration (bad kernel size, unknown stage...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A text document (config, box file, manifest, lexicon) failed to parse.
/// Carries every offending line so callers can report them all at once.
class ParseError : public Error {
 public:
  struct Issue {
    std::size_t line = 0;  // 1-based
    std::string message;
  };

  explicit ParseError(std::vector<Issue> issues)
      : Error(format(issues)), issues_(std::move(issues)) {}

  ParseError(std::size_t line, std::string message)
      : ParseError(std::vector<Issue>{{line, std::move(message)}}) {}

  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  static std::string format(const std::vector<Issue>& issues) {
    std::string out;
    for (const auto& issue : issues) {
      if (!out.empty()) out += "; ";
      out += "line " + std::to_string(issue.line) + ": " + issue.message;
    }
    return out;
  }

  std::vector<Issue> issues_;
};

/// Image file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace epig
