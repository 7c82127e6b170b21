// Copyright 2026 The sirstat Authors
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
#include <string_view>

namespace sirstat {

enum class ErrorKind {
  invalid_argument,
  invalid_probability,
  inconsistent_counts,
  root_not_found,
  not_estimable,
  rank_deficient,
  size_limit,
  empty_result,
  io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_probability: return "invalid-probability";
    case ErrorKind::inconsistent_counts: return "inconsistent-counts";
    case ErrorKind::root_not_found: return "root-not-found";
    case ErrorKind::not_estimable: return "not-estimable";
    case ErrorKind::rank_deficient: return "rank-deficient";
    case ErrorKind::size_limit: return "size-limit";
    case ErrorKind::empty_result: return "empty-result";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the kinds above so that
/// callers (the rolling fitters, the Monte-Carlo harness, the CLI) can decide
/// whether to flag and continue or abort.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const char* what) {
  if (!condition) fail(kind, what);
}

}  // namespace sirstat
