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

#include "privatefind/server.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "privatefind/errors.h"
#include "privatefind/radio_protocol.h"

namespace privatefind {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kTokenLabel = "pf-token";

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

net::ErrorCode CodeForStatus(const absl::Status& status) {
  switch (KindOf(status)) {
    case ErrorKind::kServerUnknownFinder:
      return net::ErrorCode::kUnknownFinder;
    case ErrorKind::kMalformedReport:
      return net::ErrorCode::kMalformedReport;
    case ErrorKind::kTokenRequired:
      return net::ErrorCode::kTokenRequired;
    case ErrorKind::kTooManyIds:
      return net::ErrorCode::kTooManyIds;
    case ErrorKind::kAuthFailure:
      return net::ErrorCode::kAuthFailure;
    default:
      return net::ErrorCode::kBadRequest;
  }
}

Bytes ErrorFrame(const absl::Status& status) {
  return net::Encode(net::Error{CodeForStatus(status)});
}

}  // namespace

std::string_view TokenPolicyName(TokenPolicy policy) {
  switch (policy) {
    case TokenPolicy::kOff:
      return "off";
    case TokenPolicy::kIngest:
      return "ingest";
    case TokenPolicy::kSearch:
      return "search";
    case TokenPolicy::kBoth:
      return "both";
  }
  return "off";
}

absl::StatusOr<TokenPolicy> ParseTokenPolicy(std::string_view name) {
  for (TokenPolicy p : {TokenPolicy::kOff, TokenPolicy::kIngest,
                        TokenPolicy::kSearch, TokenPolicy::kBoth}) {
    if (TokenPolicyName(p) == name) return p;
  }
  return MakeError(ErrorKind::kParseError,
                   "token policy must be off|ingest|search|both");
}

bool TokenRequiredForIngest(TokenPolicy policy) {
  return policy == TokenPolicy::kIngest || policy == TokenPolicy::kBoth;
}

bool TokenRequiredForSearch(TokenPolicy policy) {
  return policy == TokenPolicy::kSearch || policy == TokenPolicy::kBoth;
}

// ---------------------------------------------------------------------------
// ManufacturerRegistry

void ManufacturerRegistry::Add(const Identifier& id_init,
                               const SecretKey& mf_key) {
  entries_.insert_or_assign(id_init, mf_key);
}

const SecretKey* ManufacturerRegistry::Find(const Identifier& id_init) const {
  auto it = entries_.find(id_init);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string ManufacturerRegistry::ToJsonLines() const {
  std::string out;
  for (const auto& [id, key] : entries_) {
    Json j;
    j["id_init"] = HexEncode(id.span());
    j["mf_key"] = HexEncode(key.span());
    out += j.dump();
    out += '\n';
  }
  return out;
}

absl::StatusOr<ManufacturerRegistry> ManufacturerRegistry::FromJsonLines(
    std::string_view text) {
  ManufacturerRegistry registry;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&](std::string_view what) {
      return MakeError(ErrorKind::kParseError,
                       "registry line " + std::to_string(line_no) + ": " +
                           std::string(what));
    };
    Json j = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id_init") ||
        !j.contains("mf_key") || !j["id_init"].is_string() ||
        !j["mf_key"].is_string()) {
      return fail("expected {\"id_init\", \"mf_key\"}");
    }
    auto id_bytes = HexDecode(j["id_init"].get<std::string>());
    auto key_bytes = HexDecode(j["mf_key"].get<std::string>());
    if (!id_bytes.ok() || !key_bytes.ok()) return fail("bad hex");
    auto id = Identifier::FromSpan(*id_bytes);
    auto key = SecretKey::FromSpan(*key_bytes);
    if (!id.ok() || !key.ok()) return fail("fields must be 32 bytes");
    registry.Add(*id, *key);
  }
  return registry;
}

absl::Status ManufacturerRegistry::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << ToJsonLines();
  if (!out) return absl::UnavailableError("cannot write " + path);
  return absl::OkStatus();
}

absl::StatusOr<ManufacturerRegistry> ManufacturerRegistry::Load(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError("cannot read registry " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJsonLines(buffer.str());
}

// ---------------------------------------------------------------------------
// Server

absl::StatusOr<std::unique_ptr<Server>> Server::Create(
    ServerConfig config, ManufacturerRegistry registry,
    std::unique_ptr<RandomSource> rng) {
  if (config.epoch_ms <= 0) {
    return absl::InvalidArgumentError("epoch_ms must be positive");
  }
  auto log = ServerLog::Open(config.log_path);
  if (!log.ok()) return log.status();
  std::unique_ptr<Server> server(new Server(std::move(config),
                                            std::move(registry), std::move(rng),
                                            *std::move(log)));
  for (const LogEvent& event : server->log_.replayed()) server->Apply(event);
  return server;
}

Server::Server(ServerConfig config, ManufacturerRegistry registry,
               std::unique_ptr<RandomSource> rng, ServerLog log)
    : config_(std::move(config)),
      registry_(std::move(registry)),
      rng_(std::move(rng)),
      log_(std::move(log)) {}

void Server::Apply(const LogEvent& event) {
  std::visit(Overloaded{
                 [&](const log_event::Report& e) {
                   reports_.push_back(e.report);
                 },
                 [&](const log_event::MarkLost& e) {
                   lost_[e.id] = e.expires_at_ms;
                 },
                 [&](const log_event::ClearLost& e) { lost_.erase(e.id); },
                 [&](const log_event::Token& e) { tokens_.insert(e.token); },
             },
             event);
}

absl::Status Server::Record(const LogEvent& event) {
  if (absl::Status s = log_.Append(event); !s.ok()) return s;
  Apply(event);
  return absl::OkStatus();
}

bool Server::TokenValid(const std::optional<net::AccessToken>& token) const {
  return token.has_value() && tokens_.contains(*token);
}

absl::StatusOr<net::StartEncryptedSetup> Server::RegisterInit(
    const net::RegisterInit& request) {
  const SecretKey* mf_key = registry_.Find(request.id_init);
  if (mf_key == nullptr) {
    return MakeError(ErrorKind::kServerUnknownFinder, "id_init not registered");
  }
  const SecretKey setup_key = RandomFixed<SecretKey>(*rng_);
  net::StartEncryptedSetup reply{setup_key,
                                 Seal(*mf_key, setup_key.span(), *rng_)};
  return reply;
}

absl::Status Server::Ingest(const net::FoundResponse& request, int64_t now_ms) {
  if (request.report.e2e_message.wire_size() != radio::kE2eMessageSize) {
    return MakeError(ErrorKind::kMalformedReport, "e2e message size");
  }
  if (TokenRequiredForIngest(config_.token_policy) &&
      !TokenValid(request.token)) {
    return MakeError(ErrorKind::kTokenRequired, "ingest");
  }
  return Record(log_event::Report{StoredReport{
      request.report.id_rand, request.report.e2e_message, now_ms}});
}

absl::StatusOr<std::vector<StoredReport>> Server::Search(
    const net::Search& request, int64_t now_ms) const {
  if (request.ids.size() > net::kMaxSearchIds) {
    return MakeError(ErrorKind::kTooManyIds,
                     std::to_string(request.ids.size()) + " ids");
  }
  if (TokenRequiredForSearch(config_.token_policy) &&
      !TokenValid(request.token)) {
    return MakeError(ErrorKind::kTokenRequired, "search");
  }
  const std::set<Identifier> wanted(request.ids.begin(), request.ids.end());
  std::vector<StoredReport> out;
  for (auto it = reports_.rbegin(); it != reports_.rend(); ++it) {
    if (now_ms - it->received_at_ms > config_.report_ttl_ms) continue;
    if (wanted.contains(it->id_rand)) out.push_back(*it);
  }
  return out;
}

absl::Status Server::MarkLost(std::span<const Identifier> ids, int64_t now_ms) {
  const int64_t expires = now_ms + config_.lost_ttl_epochs * config_.epoch_ms;
  for (const Identifier& id : ids) {
    if (absl::Status s = Record(log_event::MarkLost{id, expires}); !s.ok()) {
      return s;
    }
  }
  return absl::OkStatus();
}

absl::Status Server::ClearLost(std::span<const Identifier> ids) {
  for (const Identifier& id : ids) {
    if (!lost_.contains(id)) continue;
    if (absl::Status s = Record(log_event::ClearLost{id}); !s.ok()) return s;
  }
  return absl::OkStatus();
}

std::vector<Identifier> Server::LostIds(int64_t now_ms) const {
  std::vector<Identifier> out;
  for (const auto& [id, expires] : lost_) {
    if (expires > now_ms) out.push_back(id);
  }
  return out;
}

absl::StatusOr<net::TokenChallenge> Server::IssueChallenge(
    const Identifier& id_init) {
  const SecretKey* mf_key = registry_.Find(id_init);
  if (mf_key == nullptr) {
    return MakeError(ErrorKind::kServerUnknownFinder, "id_init not registered");
  }
  std::array<uint8_t, 32> nonce{};
  rng_->Fill(nonce);
  ByteWriter plaintext;
  plaintext.Append(kTokenLabel).Append(nonce);
  pending_challenges_[id_init] = nonce;
  return net::TokenChallenge{id_init,
                             Seal(*mf_key, plaintext.bytes(), *rng_)};
}

absl::StatusOr<net::AccessToken> Server::RedeemChallenge(
    const net::TokenResponse& response) {
  auto it = pending_challenges_.find(response.id_init);
  if (it == pending_challenges_.end() ||
      !ConstantTimeEquals(it->second, response.nonce)) {
    return AuthFailure("challenge answer mismatch");
  }
  pending_challenges_.erase(it);
  net::AccessToken token{};
  rng_->Fill(token);
  if (absl::Status s = Record(log_event::Token{token}); !s.ok()) return s;
  return token;
}

Bytes Server::HandleFrame(ByteSpan frame, int64_t now_ms) {
  auto message = net::Decode(frame);
  if (!message.ok()) {
    auto header = net::ParseFrame(frame);
    if (header.ok() && header->code == net::Code::kFoundResponse) {
      return ErrorFrame(MakeError(ErrorKind::kMalformedReport));
    }
    return ErrorFrame(message.status());
  }
  auto reply_or_error = [](const auto& result) -> Bytes {
    if (!result.ok()) return ErrorFrame(result.status());
    return net::Encode(*result);
  };
  return std::visit(
      Overloaded{
          [&](const net::RegisterInit& m) {
            return reply_or_error(RegisterInit(m));
          },
          [&](const net::FoundResponse& m) {
            absl::Status s = Ingest(m, now_ms);
            // Unknown ids and duplicates get the same ack as fresh reports.
            return s.ok() ? net::Encode(net::GenericAck{}) : ErrorFrame(s);
          },
          [&](const net::Search& m) {
            auto found = Search(m, now_ms);
            if (!found.ok()) return ErrorFrame(found.status());
            return net::Encode(net::Found{*std::move(found)});
          },
          [&](const net::MarkLost& m) {
            absl::Status s = MarkLost(m.ids, now_ms);
            return s.ok() ? net::Encode(net::GenericAck{}) : ErrorFrame(s);
          },
          [&](const net::ClearLost& m) {
            absl::Status s = ClearLost(m.ids);
            return s.ok() ? net::Encode(net::GenericAck{}) : ErrorFrame(s);
          },
          [&](const net::GetLostIds&) {
            return net::Encode(net::LostIds{LostIds(now_ms)});
          },
          [&](const net::TokenChallenge& m) {
            if (m.challenge) return ErrorFrame(absl::InvalidArgumentError(""));
            return reply_or_error(IssueChallenge(m.id_init));
          },
          [&](const net::TokenResponse& m) {
            auto token = RedeemChallenge(m);
            if (!token.ok()) return ErrorFrame(token.status());
            return net::Encode(net::Token{*token});
          },
          [&](const auto&) {
            return ErrorFrame(absl::InvalidArgumentError("not a request"));
          },
      },
      *message);
}

void Server::OnEnvelope(const Envelope& envelope, Simulation& sim) {
  if (envelope.channel != Channel::kNetwork) return;
  Bytes reply = HandleFrame(envelope.payload, sim.now_ms());
  // A failed send only means the client went away.
  (void)sim.Send(Envelope{.src = envelope.dst,
                          .dst = envelope.src,
                          .channel = Channel::kNetwork,
                          .payload = std::move(reply),
                          .sim_time_ms = sim.now_ms()});
}

}  // namespace privatefind
