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

#ifndef PRIVATEFIND_SERVER_LOG_H_
#define PRIVATEFIND_SERVER_LOG_H_

#include <cstdint>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privatefind/crypto.h"
#include "privatefind/report.h"

namespace privatefind {

namespace log_event {

struct Report {
  StoredReport report;
};
struct MarkLost {
  Identifier id;
  int64_t expires_at_ms = 0;
};
struct ClearLost {
  Identifier id;
};
struct Token {
  std::array<uint8_t, 32> token{};
};

}  // namespace log_event

using LogEvent = std::variant<log_event::Report, log_event::MarkLost,
                              log_event::ClearLost, log_event::Token>;

// Append-only JSON-lines journal of server state changes, with hex byte
// fields. A torn final line (no trailing newline) is ignored on replay; any
// other unreadable line is an error.
class ServerLog {
 public:
  // Empty path: in-memory only, nothing is written.
  static absl::StatusOr<ServerLog> Open(const std::string& path);

  absl::Status Append(const LogEvent& event);
  // Events read by Open(), oldest first.
  const std::vector<LogEvent>& replayed() const { return replayed_; }
  const std::string& path() const { return path_; }

  static std::string Serialize(const LogEvent& event);
  static absl::StatusOr<LogEvent> Parse(std::string_view line);

 private:
  std::string path_;
  std::ofstream out_;
  std::vector<LogEvent> replayed_;
};

}  // namespace privatefind

#endif  // PRIVATEFIND_SERVER_LOG_H_
