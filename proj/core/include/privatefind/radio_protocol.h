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

// Phone <-> finder messages. Each frame is a one-byte code followed by a
// fixed-length big-endian payload:
//
//   0x01 Setup               flags:1 e2e_key:32
//   0x02 SetupOK             id_init:32
//   0x03 SetupEncBegin       sealed:80   (setup-key wrapped under mf-key)
//   0x04 AreYouLost          lat_e7:4 lon_e7:4
//   0x05 IAmLost             id_rand:32 e2e_message:60
//   0x06 SetOptOut           flag:1 epoch:4 tag:32
//   0x07 Ack
//   0x08 IdentityRead
//   0x09 IdentityReply       id_init:32
//   0x0A SetupSealed         sealed:81   (Setup body under setup-key)
//   0x0B SetupOkSealed       sealed:80   (SetupOK body under setup-key)
//   0x0C TokenChallengeRelay sealed:88   (token challenge under mf-key)
//   0x0D TokenChallengeAnswer nonce:32

#ifndef PRIVATEFIND_RADIO_PROTOCOL_H_
#define PRIVATEFIND_RADIO_PROTOCOL_H_

#include <cstdint>
#include <variant>

#include "absl/status/statusor.h"
#include "privatefind/bytes.h"
#include "privatefind/crypto.h"
#include "privatefind/geo.h"

namespace privatefind::radio {

enum class Code : uint8_t {
  kSetup = 0x01,
  kSetupOk = 0x02,
  kSetupEncBegin = 0x03,
  kAreYouLost = 0x04,
  kIAmLost = 0x05,
  kSetOptOut = 0x06,
  kAck = 0x07,
  kIdentityRead = 0x08,
  kIdentityReply = 0x09,
  kSetupSealed = 0x0A,
  kSetupOkSealed = 0x0B,
  kTokenChallengeRelay = 0x0C,
  kTokenChallengeAnswer = 0x0D,
};

// Setup flag: local variant only, replace id_init with a random value.
inline constexpr uint8_t kFlagResetIdInit = 0x01;

// Report plaintext: lat_e7 || lon_e7 || counter, all 32-bit BE.
inline constexpr size_t kReportPlaintextSize = 12;
inline constexpr size_t kE2eMessageSize = kReportPlaintextSize + kSealOverhead;
inline constexpr size_t kWrappedKeySize = 32 + kSealOverhead;
inline constexpr size_t kSetupBodySize = 1 + 32;
inline constexpr size_t kSealedSetupSize = kSetupBodySize + kSealOverhead;
inline constexpr size_t kSealedSetupOkSize = 32 + kSealOverhead;
// "pf-token" label followed by the 32-byte nonce.
inline constexpr size_t kTokenChallengePlaintextSize = 8 + 32;
inline constexpr size_t kSealedTokenChallengeSize =
    kTokenChallengePlaintextSize + kSealOverhead;

struct Setup {
  uint8_t flags = 0;
  SecretKey e2e_key;
};
struct SetupOk {
  Identifier id_init;
};
struct SetupEncBegin {
  SealedBox wrapped_setup_key;
};
struct AreYouLost {
  GeoLocation geo;
};
struct IAmLost {
  Identifier id_rand;
  SealedBox e2e_message;
};
struct SetOptOut {
  bool flag = false;
  uint32_t epoch = 0;
  Digest tag{};
};
struct Ack {};
struct IdentityRead {};
struct IdentityReply {
  Identifier id_init;
};
struct SetupSealed {
  SealedBox body;
};
struct SetupOkSealed {
  SealedBox body;
};
struct TokenChallengeRelay {
  SealedBox challenge;
};
struct TokenChallengeAnswer {
  std::array<uint8_t, 32> nonce{};
};

using Message =
    std::variant<Setup, SetupOk, SetupEncBegin, AreYouLost, IAmLost,
                 SetOptOut, Ack, IdentityRead, IdentityReply, SetupSealed,
                 SetupOkSealed, TokenChallengeRelay, TokenChallengeAnswer>;

Bytes Encode(const Message& message);
// Rejects unknown codes and any payload whose length differs from the
// fixed size of its code.
absl::StatusOr<Message> Decode(ByteSpan frame);

// Body carried inside SetupSealed: flags || e2e_key.
Bytes EncodeSetupBody(const Setup& setup);
absl::StatusOr<Setup> DecodeSetupBody(ByteSpan body);

Bytes EncodeReportPlaintext(const GeoLocation& geo, uint32_t counter);

// Tag authorising an opt-out change:
// HMAC(e2e_key, "optout" || flag || epoch (u32 BE)).
Digest OptOutTag(const SecretKey& e2e_key, bool flag, uint32_t epoch);

}  // namespace privatefind::radio

#endif  // PRIVATEFIND_RADIO_PROTOCOL_H_
