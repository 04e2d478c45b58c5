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

// Symmetric primitives shared by all roles.
//
// Identifiers rotate by an HMAC-SHA256 ratchet keyed with the end-to-end key:
//
//   id_rand[0]   = HMAC-SHA256(e2e_key, id_init)
//   id_rand[n+1] = HMAC-SHA256(e2e_key, id_rand[n])
//
// Payloads are sealed with AES-128-CTR followed by HMAC-SHA256 over
// (nonce || ciphertext). Both subkeys come from the caller's key through
// labelled HMAC so one 32-byte key serves both purposes. On the wire a sealed
// box is nonce[16] || ciphertext[len] || tag[32] with no length prefix.

#ifndef PRIVATEFIND_CRYPTO_H_
#define PRIVATEFIND_CRYPTO_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privatefind/bytes.h"
#include "privatefind/random.h"

namespace privatefind {

struct SecretKeyTag {};
struct IdentifierTag {};

// Opaque 32-byte secret. Used for the end-to-end key, the manufacturing key
// and the ephemeral setup key.
using SecretKey = FixedBytes<SecretKeyTag, 32>;
// 32-byte finder identifier (id_init and every id_rand).
using Identifier = FixedBytes<IdentifierTag, 32>;
using Digest = std::array<uint8_t, 32>;

inline constexpr size_t kNonceSize = 16;
inline constexpr size_t kTagSize = 32;
inline constexpr size_t kSealOverhead = kNonceSize + kTagSize;

template <typename Fixed>
Fixed RandomFixed(RandomSource& rng) {
  Fixed out;
  rng.Fill(out.mutable_span());
  return out;
}

Digest HmacSha256(ByteSpan key, ByteSpan message);

// AES-128 in counter mode; the IV is the initial 128-bit counter block.
// Encryption and decryption are the same transform.
Bytes Aes128Ctr(ByteSpan key16, ByteSpan iv16, ByteSpan data);

// Constant-time equality for tags.
bool ConstantTimeEquals(ByteSpan a, ByteSpan b);

Identifier RatchetFirst(const SecretKey& e2e_key, const Identifier& id_init);
Identifier RatchetNext(const SecretKey& e2e_key, const Identifier& id_prev);
// id_rand for `epoch`, i.e. RatchetFirst followed by `epoch` RatchetNext.
Identifier RatchetAt(const SecretKey& e2e_key, const Identifier& id_init,
                     uint64_t epoch);

struct Subkeys {
  SecretKey enc;
  SecretKey mac;
};

Subkeys DeriveSubkeys(const SecretKey& key);

struct SealedBox {
  std::array<uint8_t, kNonceSize> nonce{};
  Bytes ciphertext;
  std::array<uint8_t, kTagSize> tag{};

  size_t wire_size() const { return kSealOverhead + ciphertext.size(); }
  Bytes Serialize() const;
  // Structural parse only; authenticity is checked by Open().
  static absl::StatusOr<SealedBox> Parse(ByteSpan wire);

  friend bool operator==(const SealedBox&, const SealedBox&) = default;
};

// Encrypt-then-MAC under a fresh random nonce. `plaintext` must be non-empty.
SealedBox Seal(const SecretKey& key, ByteSpan plaintext, RandomSource& rng);

// Verifies the tag before decrypting. Returns Unauthenticated ("AuthFailure")
// on any mismatch and never exposes partial plaintext.
absl::StatusOr<Bytes> Open(const SecretKey& key, const SealedBox& box);

}  // namespace privatefind

#endif  // PRIVATEFIND_CRYPTO_H_
