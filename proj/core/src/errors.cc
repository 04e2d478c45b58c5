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

#include "privatefind/errors.h"

#include <array>
#include <string>

namespace privatefind {

namespace {

struct KindInfo {
  ErrorKind kind;
  std::string_view name;
  absl::StatusCode code;
};

constexpr std::array<KindInfo, 12> kKinds = {{
    {ErrorKind::kAuthFailure, "AuthFailure", absl::StatusCode::kUnauthenticated},
    {ErrorKind::kTimeout, "Timeout", absl::StatusCode::kDeadlineExceeded},
    {ErrorKind::kRejected, "Rejected", absl::StatusCode::kPermissionDenied},
    {ErrorKind::kServerUnknownFinder, "ServerUnknownFinder",
     absl::StatusCode::kNotFound},
    {ErrorKind::kMalformedReport, "MalformedReport",
     absl::StatusCode::kInvalidArgument},
    {ErrorKind::kTokenRequired, "TokenRequired",
     absl::StatusCode::kPermissionDenied},
    {ErrorKind::kTooManyIds, "TooManyIds", absl::StatusCode::kOutOfRange},
    {ErrorKind::kImportError, "ImportError", absl::StatusCode::kDataLoss},
    {ErrorKind::kUnknownEndpoint, "UnknownEndpoint",
     absl::StatusCode::kNotFound},
    {ErrorKind::kNetworkError, "NetworkError", absl::StatusCode::kUnavailable},
    {ErrorKind::kParseError, "ParseError", absl::StatusCode::kInvalidArgument},
    {ErrorKind::kOther, "Error", absl::StatusCode::kInternal},
}};

}  // namespace

std::string_view ErrorKindName(ErrorKind kind) {
  if (kind == ErrorKind::kNone) return "OK";
  for (const auto& info : kKinds) {
    if (info.kind == kind) return info.name;
  }
  return "Error";
}

ErrorKind ErrorKindFromName(std::string_view name) {
  if (name == "OK") return ErrorKind::kNone;
  for (const auto& info : kKinds) {
    if (info.name == name) return info.kind;
  }
  return ErrorKind::kOther;
}

absl::Status MakeError(ErrorKind kind, std::string_view detail) {
  if (kind == ErrorKind::kNone) return absl::OkStatus();
  absl::StatusCode code = absl::StatusCode::kInternal;
  for (const auto& info : kKinds) {
    if (info.kind == kind) code = info.code;
  }
  std::string message(ErrorKindName(kind));
  if (!detail.empty()) {
    message += ": ";
    message += detail;
  }
  return absl::Status(code, message);
}

ErrorKind KindOf(const absl::Status& status) {
  if (status.ok()) return ErrorKind::kNone;
  std::string_view message(status.message().data(), status.message().size());
  std::string_view head = message.substr(0, message.find(':'));
  return ErrorKindFromName(head);
}

}  // namespace privatefind
