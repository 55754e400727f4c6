// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
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

namespace mmkey {

/// Coarse failure class; the CLI prints it as a machine-readable tag.
enum class ErrorCategory {
  invalid_argument,
  no_key,
  budget_exceeded,
  geometry,
  config,
  io,
};

constexpr std::string_view to_string(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::invalid_argument: return "invalid_argument";
    case ErrorCategory::no_key: return "no_key";
    case ErrorCategory::budget_exceeded: return "budget_exceeded";
    case ErrorCategory::geometry: return "geometry";
    case ErrorCategory::config: return "config";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

// Thrown when the eavesdropper bound leaves nothing to extract.
class NoKeyError : public Error {
 public:
  explicit NoKeyError(const std::string& what) : Error(ErrorCategory::no_key, what) {}
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& what) { throw Error(c, what); }

inline void require(bool cond, ErrorCategory c, const std::string& what) {
  if (!cond) fail(c, what);
}

}  // namespace mmkey
