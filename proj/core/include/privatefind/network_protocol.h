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

// Phone <-> server messages, framed as type:1 || length:4 (BE) || payload.
//
//   0x10 RegisterInit        id_init:32
//   0x11 StartEncryptedSetup setup_key:32 wrapped:80
//   0x12 FoundResponse       id_rand:32 e2e_message:60 [token:32]
//   0x13 GenericAck          status:1 (always 0x00)
//   0x14 Search              count:1 id:32*count [token:32]
//   0x15 Found               count:2 (id_rand:32 e2e_message:60 received_at:8)*
//   0x16 MarkLost            count:1 id:32*count
//   0x17 ClearLost           count:1 id:32*count
//   0x18 GetLostIds          (empty)
//   0x19 LostIds             count:2 id:32*count
//   0x1A TokenChallenge      id_init:32 [challenge:88]   (request / reply)
//   0x1B TokenResponse       id_init:32 nonce:32
//   0x1C Token               token:32
//   0x1F Error               code:1

#ifndef PRIVATEFIND_NETWORK_PROTOCOL_H_
#define PRIVATEFIND_NETWORK_PROTOCOL_H_

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "privatefind/bytes.h"
#include "privatefind/crypto.h"
#include "privatefind/errors.h"
#include "privatefind/report.h"

namespace privatefind::net {

enum class Code : uint8_t {
  kRegisterInit = 0x10,
  kStartEncryptedSetup = 0x11,
  kFoundResponse = 0x12,
  kGenericAck = 0x13,
  kSearch = 0x14,
  kFound = 0x15,
  kMarkLost = 0x16,
  kClearLost = 0x17,
  kGetLostIds = 0x18,
  kLostIds = 0x19,
  kTokenChallenge = 0x1A,
  kTokenResponse = 0x1B,
  kToken = 0x1C,
  kError = 0x1F,
};

inline constexpr size_t kFrameHeaderSize = 5;
inline constexpr size_t kMaxSearchIds = 64;
inline constexpr size_t kFoundResponseSize = 32 + 60;

using AccessToken = std::array<uint8_t, 32>;

enum class ErrorCode : uint8_t {
  kUnknownFinder = 1,
  kMalformedReport = 2,
  kTokenRequired = 3,
  kTooManyIds = 4,
  kAuthFailure = 5,
  kBadRequest = 6,
};

struct RegisterInit {
  Identifier id_init;
};
struct StartEncryptedSetup {
  SecretKey setup_key;
  SealedBox wrapped;
};
struct FoundResponse {
  LocationReport report;
  std::optional<AccessToken> token;
};
struct GenericAck {};
struct Search {
  std::vector<Identifier> ids;
  std::optional<AccessToken> token;
};
struct Found {
  std::vector<StoredReport> reports;
};
struct MarkLost {
  std::vector<Identifier> ids;
};
struct ClearLost {
  std::vector<Identifier> ids;
};
struct GetLostIds {};
struct LostIds {
  std::vector<Identifier> ids;
};
struct TokenChallenge {
  Identifier id_init;
  std::optional<SealedBox> challenge;
};
struct TokenResponse {
  Identifier id_init;
  std::array<uint8_t, 32> nonce{};
};
struct Token {
  AccessToken token{};
};
struct Error {
  ErrorCode code = ErrorCode::kBadRequest;
};

using Message =
    std::variant<RegisterInit, StartEncryptedSetup, FoundResponse, GenericAck,
                 Search, Found, MarkLost, ClearLost, GetLostIds, LostIds,
                 TokenChallenge, TokenResponse, Token, Error>;

struct Frame {
  Code code;
  ByteSpan payload;
};

// Splits header from payload; the length field must match exactly.
absl::StatusOr<Frame> ParseFrame(ByteSpan bytes);

Bytes Encode(const Message& message);
absl::StatusOr<Message> Decode(ByteSpan bytes);

// Protocol error kind carried by an Error reply.
ErrorKind KindForErrorCode(ErrorCode code);

}  // namespace privatefind::net

#endif  // PRIVATEFIND_NETWORK_PROTOCOL_H_
