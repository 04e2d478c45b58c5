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

// Owner identity export for moving a finder binding to another phone.
//
// Binary layout (85 bytes, big-endian):
//   "PFID" | version=0x01 | id_init[32] | e2e_key[32] | setup_time:i64 |
//   epoch_len:u32 | crc32:u32
// The CRC (zlib polynomial) covers every preceding byte. The text form is
// RFC 4648 base32 without padding; 85 bytes encode to exactly 136 symbols,
// so every symbol carries payload bits.

#ifndef PRIVATEFIND_IDENTITY_EXPORT_H_
#define PRIVATEFIND_IDENTITY_EXPORT_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "privatefind/bytes.h"
#include "privatefind/owner.h"

namespace privatefind {

inline constexpr size_t kIdentityBlobSize = 85;
inline constexpr uint8_t kIdentityBlobVersion = 0x01;

std::string Base32Encode(ByteSpan bytes);
// Upper-case alphabet only; padding is not accepted.
absl::StatusOr<Bytes> Base32Decode(std::string_view text);

Bytes EncodeIdentityBlob(const OwnerRecord& record);
// ImportError on bad length, magic, version or CRC. Local-only fields of the
// returned record are reset.
absl::StatusOr<OwnerRecord> DecodeIdentityBlob(ByteSpan blob);

std::string ExportIdentityText(const OwnerRecord& record);
absl::StatusOr<OwnerRecord> ImportIdentityText(std::string_view text);

}  // namespace privatefind

#endif  // PRIVATEFIND_IDENTITY_EXPORT_H_
