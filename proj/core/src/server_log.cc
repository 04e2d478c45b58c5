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

#include "privatefind/server_log.h"

#include <sstream>
#include <utility>

#include "json.hpp"
#include "privatefind/errors.h"

namespace privatefind {

namespace {

using Json = nlohmann::ordered_json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

template <typename Fixed>
Fixed FixedFromHex(const Json& j, const char* field) {
  auto bytes = HexDecode(j.at(field).get<std::string>());
  if (!bytes.ok()) throw std::invalid_argument(std::string(field) + " not hex");
  auto fixed = Fixed::FromSpan(*bytes);
  if (!fixed.ok()) throw std::invalid_argument(std::string(field) + " size");
  return *fixed;
}

}  // namespace

std::string ServerLog::Serialize(const LogEvent& event) {
  Json j;
  std::visit(
      Overloaded{
          [&](const log_event::Report& e) {
            j["event"] = "report";
            j["id_rand"] = HexEncode(e.report.id_rand.span());
            j["e2e_message"] = HexEncode(e.report.e2e_message.Serialize());
            j["received_at"] = e.report.received_at_ms;
          },
          [&](const log_event::MarkLost& e) {
            j["event"] = "mark_lost";
            j["id"] = HexEncode(e.id.span());
            j["expires_at"] = e.expires_at_ms;
          },
          [&](const log_event::ClearLost& e) {
            j["event"] = "clear_lost";
            j["id"] = HexEncode(e.id.span());
          },
          [&](const log_event::Token& e) {
            j["event"] = "token";
            j["token"] = HexEncode(e.token);
          },
      },
      event);
  return j.dump();
}

absl::StatusOr<LogEvent> ServerLog::Parse(std::string_view line) {
  Json j = Json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return MakeError(ErrorKind::kParseError, "log line is not JSON");
  }
  try {
    const std::string event = j.at("event").get<std::string>();
    if (event == "report") {
      auto box_bytes = HexDecode(j.at("e2e_message").get<std::string>());
      if (!box_bytes.ok()) return box_bytes.status();
      auto box = SealedBox::Parse(*box_bytes);
      if (!box.ok()) return box.status();
      return log_event::Report{StoredReport{
          FixedFromHex<Identifier>(j, "id_rand"), *std::move(box),
          j.at("received_at").get<int64_t>()}};
    }
    if (event == "mark_lost") {
      return log_event::MarkLost{FixedFromHex<Identifier>(j, "id"),
                                 j.at("expires_at").get<int64_t>()};
    }
    if (event == "clear_lost") {
      return log_event::ClearLost{FixedFromHex<Identifier>(j, "id")};
    }
    if (event == "token") {
      log_event::Token t;
      t.token = FixedFromHex<Identifier>(j, "token").array();
      return t;
    }
    return MakeError(ErrorKind::kParseError, "unknown event " + event);
  } catch (const std::exception& ex) {
    return MakeError(ErrorKind::kParseError, ex.what());
  }
}

absl::StatusOr<ServerLog> ServerLog::Open(const std::string& path) {
  ServerLog log;
  log.path_ = path;
  if (path.empty()) return log;

  {
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::stringstream buffer;
      buffer << in.rdbuf();
      const std::string content = buffer.str();
      size_t start = 0;
      int line_no = 0;
      while (start < content.size()) {
        size_t end = content.find('\n', start);
        ++line_no;
        if (end == std::string::npos) break;  // torn write
        std::string_view line(content.data() + start, end - start);
        start = end + 1;
        if (line.empty()) continue;
        auto event = Parse(line);
        if (!event.ok()) {
          return MakeError(ErrorKind::kParseError,
                           path + ":" + std::to_string(line_no) + ": " +
                               std::string(event.status().message()));
        }
        log.replayed_.push_back(*std::move(event));
      }
      if (start < content.size()) {
        // Drop the torn tail so the next append starts on a fresh line.
        std::ofstream rewrite(path, std::ios::binary | std::ios::trunc);
        rewrite.write(content.data(), static_cast<std::streamsize>(start));
      }
    }
  }
  log.out_.open(path, std::ios::binary | std::ios::app);
  if (!log.out_) return absl::UnavailableError("cannot open log " + path);
  return log;
}

absl::Status ServerLog::Append(const LogEvent& event) {
  if (path_.empty()) return absl::OkStatus();
  out_ << Serialize(event) << '\n';
  out_.flush();
  if (!out_) return absl::UnavailableError("log write failed: " + path_);
  return absl::OkStatus();
}

}  // namespace privatefind
