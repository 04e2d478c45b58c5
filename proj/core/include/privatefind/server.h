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

#ifndef PRIVATEFIND_SERVER_H_
#define PRIVATEFIND_SERVER_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privatefind/crypto.h"
#include "privatefind/network_protocol.h"
#include "privatefind/random.h"
#include "privatefind/report.h"
#include "privatefind/server_log.h"
#include "privatefind/transport.h"

namespace privatefind {

enum class TokenPolicy { kOff, kIngest, kSearch, kBoth };

std::string_view TokenPolicyName(TokenPolicy policy);
absl::StatusOr<TokenPolicy> ParseTokenPolicy(std::string_view name);
bool TokenRequiredForIngest(TokenPolicy policy);
bool TokenRequiredForSearch(TokenPolicy policy);

inline constexpr int64_t kDefaultReportTtlMs = 30LL * 24 * 3600 * 1000;

struct ServerConfig {
  int64_t epoch_ms = 900000;
  int64_t report_ttl_ms = kDefaultReportTtlMs;
  int64_t lost_ttl_epochs = 2;
  TokenPolicy token_policy = TokenPolicy::kOff;
  // Empty: no persistence.
  std::string log_path;
};

// id_init -> manufacturer key, loaded once by the operator. One JSON object
// per line: {"id_init": hex, "mf_key": hex}.
class ManufacturerRegistry {
 public:
  void Add(const Identifier& id_init, const SecretKey& mf_key);
  const SecretKey* Find(const Identifier& id_init) const;
  size_t size() const { return entries_.size(); }

  std::string ToJsonLines() const;
  static absl::StatusOr<ManufacturerRegistry> FromJsonLines(
      std::string_view text);
  absl::Status Save(const std::string& path) const;
  static absl::StatusOr<ManufacturerRegistry> Load(const std::string& path);

 private:
  std::map<Identifier, SecretKey> entries_;
};

// Anonymous report store. It sees only id_rand values, sealed blobs and its
// own receive times.
class Server final : public Node {
 public:
  // Replays the log at config.log_path, if any.
  static absl::StatusOr<std::unique_ptr<Server>> Create(
      ServerConfig config, ManufacturerRegistry registry,
      std::unique_ptr<RandomSource> rng);

  void OnEnvelope(const Envelope& envelope, Simulation& sim) override;

  // Handles one request frame and returns the reply frame.
  Bytes HandleFrame(ByteSpan frame, int64_t now_ms);

  // Direct entry points, also used by HandleFrame.
  absl::StatusOr<net::StartEncryptedSetup> RegisterInit(
      const net::RegisterInit& request);
  absl::Status Ingest(const net::FoundResponse& request, int64_t now_ms);
  absl::StatusOr<std::vector<StoredReport>> Search(const net::Search& request,
                                                   int64_t now_ms) const;
  absl::Status MarkLost(std::span<const Identifier> ids, int64_t now_ms);
  absl::Status ClearLost(std::span<const Identifier> ids);
  std::vector<Identifier> LostIds(int64_t now_ms) const;
  absl::StatusOr<net::TokenChallenge> IssueChallenge(const Identifier& id_init);
  absl::StatusOr<net::AccessToken> RedeemChallenge(
      const net::TokenResponse& response);

  const ServerConfig& config() const { return config_; }
  const ManufacturerRegistry& registry() const { return registry_; }
  // Every accepted upload, duplicates included, in arrival order.
  const std::vector<StoredReport>& reports() const { return reports_; }
  size_t token_count() const { return tokens_.size(); }

 private:
  Server(ServerConfig config, ManufacturerRegistry registry,
         std::unique_ptr<RandomSource> rng, ServerLog log);

  void Apply(const LogEvent& event);
  absl::Status Record(const LogEvent& event);
  bool TokenValid(const std::optional<net::AccessToken>& token) const;

  ServerConfig config_;
  const ManufacturerRegistry registry_;
  std::unique_ptr<RandomSource> rng_;
  ServerLog log_;

  std::vector<StoredReport> reports_;
  std::map<Identifier, int64_t> lost_;  // id -> expiry
  std::set<net::AccessToken> tokens_;
  std::map<Identifier, std::array<uint8_t, 32>> pending_challenges_;
};

}  // namespace privatefind

#endif  // PRIVATEFIND_SERVER_H_
