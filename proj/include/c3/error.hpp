// Copyright 2026 The C3 Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace c3 {

enum class ErrorKind {
  kInvalidArgument,
  kNotFound,
  kDuplicate,
  kParse,
  kPrecondition,
  kBudget,
  kNetwork,
  kHttpStatus,
  kMissingCredential,
  kResponseParse,
  kIo,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kNotFound: return "not-found";
    case ErrorKind::kDuplicate: return "duplicate";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kBudget: return "budget";
    case ErrorKind::kNetwork: return "network";
    case ErrorKind::kHttpStatus: return "http-status";
    case ErrorKind::kMissingCredential: return "missing-credential";
    case ErrorKind::kResponseParse: return "response-parse";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

// All library failures are reported as c3::Error; kind() lets callers
// branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse failures carry a 1-based source location.
class ParseError : public Error {
 public:
  ParseError(std::string path, int line, int column, const std::string& what)
      : Error(ErrorKind::kParse, path + ":" + std::to_string(line) + ":" +
                                     std::to_string(column) + ": " + what),
        path_(std::move(path)),
        line_(line),
        column_(column) {}

  const std::string& path() const noexcept { return path_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string path_;
  int line_;
  int column_;
};

}  // namespace c3
