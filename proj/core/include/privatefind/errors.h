// Copyright 2026 The PrivateFind Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Protocol error kinds. Each maps onto an absl status code and prefixes the
// message with its kind name so scenario scripts and logs can match on it.

#ifndef PRIVATEFIND_ERRORS_H_
#define PRIVATEFIND_ERRORS_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"

namespace privatefind {

enum class ErrorKind {
  kNone,
  kAuthFailure,
  kTimeout,
  kRejected,
  kServerUnknownFinder,
  kMalformedReport,
  kTokenRequired,
  kTooManyIds,
  kImportError,
  kUnknownEndpoint,
  kNetworkError,
  kParseError,
  kOther,
};

std::string_view ErrorKindName(ErrorKind kind);
// Inverse of ErrorKindName; kOther for unrecognised names.
ErrorKind ErrorKindFromName(std::string_view name);

absl::Status MakeError(ErrorKind kind, std::string_view detail = {});
ErrorKind KindOf(const absl::Status& status);

inline absl::Status AuthFailure(std::string_view detail = {}) {
  return MakeError(ErrorKind::kAuthFailure, detail);
}
inline absl::Status Timeout(std::string_view detail = {}) {
  return MakeError(ErrorKind::kTimeout, detail);
}

}  // namespace privatefind

#endif  // PRIVATEFIND_ERRORS_H_
