// Copyright 2026 The codequal Authors
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

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace codequal {

/// Failure class used by the retry machinery: transient errors are eligible
/// for backoff-and-retry, permanent errors surface immediately.
enum class ErrorKind { transient, permanent };

/// Origin of a failure, used by the CLI to pick an exit code.
enum class ErrorDomain { general, usage, ingestion, provider, internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string detail,
        std::optional<int> http_status = std::nullopt,
        ErrorDomain domain = ErrorDomain::general)
      : std::runtime_error(detail),
        kind_(kind),
        http_status_(http_status),
        domain_(domain) {}

  ErrorKind kind() const noexcept { return kind_; }
  bool transient() const noexcept { return kind_ == ErrorKind::transient; }
  const std::optional<int>& http_status() const noexcept {
    return http_status_;
  }
  ErrorDomain domain() const noexcept { return domain_; }

 private:
  ErrorKind kind_;
  std::optional<int> http_status_;
  ErrorDomain domain_;
};

inline Error transient_error(std::string detail,
                             std::optional<int> http_status = std::nullopt,
                             ErrorDomain domain = ErrorDomain::general) {
  return Error(ErrorKind::transient, std::move(detail), http_status, domain);
}

inline Error permanent_error(std::string detail,
                             std::optional<int> http_status = std::nullopt,
                             ErrorDomain domain = ErrorDomain::general) {
  return Error(ErrorKind::permanent, std::move(detail), http_status, domain);
}

inline Error usage_error(std::string detail) {
  return Error(ErrorKind::permanent, std::move(detail), std::nullopt,
               ErrorDomain::usage);
}

inline Error ingestion_error(ErrorKind kind, std::string detail,
                             std::optional<int> http_status = std::nullopt) {
  return Error(kind, std::move(detail), http_status, ErrorDomain::ingestion);
}

/// Raised when a transient failure survives every allowed attempt. Carries
/// the last transient error's detail. Marked permanent so that an enclosing
/// retry layer does not retry it again.
class RetryExhausted : public Error {
 public:
  RetryExhausted(int attempts, const Error& last)
      : Error(ErrorKind::permanent,
              "retry exhausted after " + std::to_string(attempts) +
                  " attempts; last error: " + last.what(),
              last.http_status(), last.domain()),
        attempts_(attempts),
        last_detail_(last.what()) {}

  int attempts() const noexcept { return attempts_; }
  const std::string& last_detail() const noexcept { return last_detail_; }

 private:
  int attempts_;
  std::string last_detail_;
};

}  // namespace codequal
