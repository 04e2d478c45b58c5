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

#include "privatefind/identity_export.h"

#include <zlib.h>

#include "privatefind/errors.h"

namespace privatefind {

namespace {

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ234567";
constexpr std::string_view kMagic = "PFID";

int SymbolValue(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= '2' && c <= '7') return c - '2' + 26;
  return -1;
}

uint32_t Crc32(ByteSpan bytes) {
  return static_cast<uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(bytes.size())));
}

}  // namespace

std::string Base32Encode(ByteSpan bytes) {
  std::string out;
  out.reserve((bytes.size() * 8 + 4) / 5);
  uint32_t buffer = 0;
  int bits = 0;
  for (uint8_t b : bytes) {
    buffer = (buffer << 8) | b;
    bits += 8;
    while (bits >= 5) {
      out.push_back(kAlphabet[(buffer >> (bits - 5)) & 0x1f]);
      bits -= 5;
    }
  }
  if (bits > 0) out.push_back(kAlphabet[(buffer << (5 - bits)) & 0x1f]);
  return out;
}

absl::StatusOr<Bytes> Base32Decode(std::string_view text) {
  Bytes out;
  out.reserve(text.size() * 5 / 8);
  uint32_t buffer = 0;
  int bits = 0;
  for (char c : text) {
    int v = SymbolValue(c);
    if (v < 0) return absl::InvalidArgumentError("invalid base32 symbol");
    buffer = (buffer << 5) | static_cast<uint32_t>(v);
    bits += 5;
    if (bits >= 8) {
      out.push_back(static_cast<uint8_t>(buffer >> (bits - 8)));
      bits -= 8;
    }
  }
  // Leftover bits must be zero padding, otherwise two texts would decode to
  // the same bytes.
  if (bits >= 5 || (buffer & ((1u << bits) - 1)) != 0) {
    return absl::InvalidArgumentError("non-canonical base32 tail");
  }
  return out;
}

Bytes EncodeIdentityBlob(const OwnerRecord& record) {
  ByteWriter w;
  w.Append(kMagic)
      .U8(kIdentityBlobVersion)
      .Append(record.id_init.span())
      .Append(record.e2e_key.span())
      .I64(record.setup_time_ms)
      .U32(static_cast<uint32_t>(record.epoch_ms));
  w.U32(Crc32(w.bytes()));
  return w.Take();
}

absl::StatusOr<OwnerRecord> DecodeIdentityBlob(ByteSpan blob) {
  if (blob.size() != kIdentityBlobSize) {
    return MakeError(ErrorKind::kImportError, "blob must be 85 bytes");
  }
  ByteReader r(blob);
  auto magic = *r.Take(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    return MakeError(ErrorKind::kImportError, "bad magic");
  }
  if (*r.U8() != kIdentityBlobVersion) {
    return MakeError(ErrorKind::kImportError, "unsupported version");
  }
  OwnerRecord record;
  record.id_init = *r.TakeFixed<Identifier>();
  record.e2e_key = *r.TakeFixed<SecretKey>();
  record.setup_time_ms = *r.I64();
  record.epoch_ms = *r.U32();
  uint32_t crc = *r.U32();
  if (crc != Crc32(blob.first(kIdentityBlobSize - 4))) {
    return MakeError(ErrorKind::kImportError, "checksum mismatch");
  }
  if (record.epoch_ms <= 0) {
    return MakeError(ErrorKind::kImportError, "zero epoch length");
  }
  return record;
}

std::string ExportIdentityText(const OwnerRecord& record) {
  return Base32Encode(EncodeIdentityBlob(record));
}

absl::StatusOr<OwnerRecord> ImportIdentityText(std::string_view text) {
  auto blob = Base32Decode(text);
  if (!blob.ok()) {
    return MakeError(ErrorKind::kImportError, std::string(blob.status().message()));
  }
  return DecodeIdentityBlob(*blob);
}

}  // namespace privatefind
