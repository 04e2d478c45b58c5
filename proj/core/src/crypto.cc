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

#include "privatefind/crypto.h"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "privatefind/errors.h"

namespace privatefind {

namespace {

constexpr std::string_view kEncLabel = "PF-enc";
constexpr std::string_view kMacLabel = "PF-mac";

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};

ByteSpan AsBytes(std::string_view s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

SecretKey KeyFromDigest(const Digest& d) { return SecretKey(d); }

Digest MacOver(const SecretKey& mac_key, ByteSpan nonce, ByteSpan ciphertext) {
  Bytes authenticated;
  authenticated.reserve(nonce.size() + ciphertext.size());
  authenticated.insert(authenticated.end(), nonce.begin(), nonce.end());
  authenticated.insert(authenticated.end(), ciphertext.begin(),
                       ciphertext.end());
  return HmacSha256(mac_key.span(), authenticated);
}

}  // namespace

Digest HmacSha256(ByteSpan key, ByteSpan message) {
  Digest out{};
  unsigned int out_len = 0;
  // OpenSSL rejects a null key pointer, which an empty span may carry.
  static const uint8_t kEmpty = 0;
  const uint8_t* key_data = key.empty() ? &kEmpty : key.data();
  const uint8_t* msg_data = message.empty() ? &kEmpty : message.data();
  if (HMAC(EVP_sha256(), key_data, static_cast<int>(key.size()), msg_data,
           message.size(), out.data(), &out_len) == nullptr) {
    throw std::runtime_error("HMAC-SHA256 failed");
  }
  return out;
}

Bytes Aes128Ctr(ByteSpan key16, ByteSpan iv16, ByteSpan data) {
  if (key16.size() != 16 || iv16.size() != 16) {
    throw std::invalid_argument("AES-128-CTR needs 16-byte key and IV");
  }
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::bad_alloc();
  Bytes out(data.size());
  int len = 0;
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ctr(), nullptr, key16.data(),
                         iv16.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), out.data(), &len, data.data(),
                        static_cast<int>(data.size())) != 1) {
    throw std::runtime_error("AES-128-CTR failed");
  }
  int tail = 0;
  EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &tail);
  return out;
}

bool ConstantTimeEquals(ByteSpan a, ByteSpan b) {
  if (a.size() != b.size()) return false;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

Identifier RatchetFirst(const SecretKey& e2e_key, const Identifier& id_init) {
  return Identifier(HmacSha256(e2e_key.span(), id_init.span()));
}

Identifier RatchetNext(const SecretKey& e2e_key, const Identifier& id_prev) {
  return Identifier(HmacSha256(e2e_key.span(), id_prev.span()));
}

Identifier RatchetAt(const SecretKey& e2e_key, const Identifier& id_init,
                     uint64_t epoch) {
  Identifier id = RatchetFirst(e2e_key, id_init);
  for (uint64_t i = 0; i < epoch; ++i) id = RatchetNext(e2e_key, id);
  return id;
}

Subkeys DeriveSubkeys(const SecretKey& key) {
  return Subkeys{
      .enc = KeyFromDigest(HmacSha256(key.span(), AsBytes(kEncLabel))),
      .mac = KeyFromDigest(HmacSha256(key.span(), AsBytes(kMacLabel))),
  };
}

Bytes SealedBox::Serialize() const {
  Bytes out;
  out.reserve(wire_size());
  out.insert(out.end(), nonce.begin(), nonce.end());
  out.insert(out.end(), ciphertext.begin(), ciphertext.end());
  out.insert(out.end(), tag.begin(), tag.end());
  return out;
}

absl::StatusOr<SealedBox> SealedBox::Parse(ByteSpan wire) {
  if (wire.size() <= kSealOverhead) {
    return absl::InvalidArgumentError("sealed box too short");
  }
  SealedBox box;
  std::copy_n(wire.begin(), kNonceSize, box.nonce.begin());
  box.ciphertext.assign(wire.begin() + kNonceSize, wire.end() - kTagSize);
  std::copy(wire.end() - kTagSize, wire.end(), box.tag.begin());
  return box;
}

SealedBox Seal(const SecretKey& key, ByteSpan plaintext, RandomSource& rng) {
  if (plaintext.empty()) {
    throw std::invalid_argument("Seal requires a non-empty plaintext");
  }
  Subkeys subkeys = DeriveSubkeys(key);
  SealedBox box;
  rng.Fill(box.nonce);
  box.ciphertext =
      Aes128Ctr(subkeys.enc.span().first(16), box.nonce, plaintext);
  box.tag = MacOver(subkeys.mac, box.nonce, box.ciphertext);
  return box;
}

absl::StatusOr<Bytes> Open(const SecretKey& key, const SealedBox& box) {
  Subkeys subkeys = DeriveSubkeys(key);
  Digest expected = MacOver(subkeys.mac, box.nonce, box.ciphertext);
  if (!ConstantTimeEquals(expected, box.tag)) {
    return AuthFailure("tag mismatch");
  }
  return Aes128Ctr(subkeys.enc.span().first(16), box.nonce, box.ciphertext);
}

}  // namespace privatefind
