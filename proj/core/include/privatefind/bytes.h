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

#ifndef PRIVATEFIND_BYTES_H_
#define PRIVATEFIND_BYTES_H_

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace privatefind {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

// Fixed-width byte string. The tag keeps keys and identifiers from being
// mixed up at compile time even though both are 32 bytes.
template <typename Tag, size_t N>
class FixedBytes {
 public:
  static constexpr size_t kSize = N;

  FixedBytes() { bytes_.fill(0); }
  explicit FixedBytes(const std::array<uint8_t, N>& bytes) : bytes_(bytes) {}

  static FixedBytes Filled(uint8_t value) {
    FixedBytes out;
    out.bytes_.fill(value);
    return out;
  }

  static absl::StatusOr<FixedBytes> FromSpan(ByteSpan span) {
    if (span.size() != N) {
      return absl::InvalidArgumentError("expected " + std::to_string(N) +
                                        " bytes, got " +
                                        std::to_string(span.size()));
    }
    FixedBytes out;
    std::copy(span.begin(), span.end(), out.bytes_.begin());
    return out;
  }

  ByteSpan span() const { return bytes_; }
  std::span<uint8_t> mutable_span() { return bytes_; }
  const std::array<uint8_t, N>& array() const { return bytes_; }
  const uint8_t* data() const { return bytes_.data(); }
  constexpr size_t size() const { return N; }

  friend bool operator==(const FixedBytes&, const FixedBytes&) = default;
  friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;

 private:
  std::array<uint8_t, N> bytes_;
};

std::string HexEncode(ByteSpan bytes);
absl::StatusOr<Bytes> HexDecode(std::string_view hex);

// True if `needle` occurs anywhere in `haystack`.
bool ContainsSubsequence(ByteSpan haystack, ByteSpan needle);

// Big-endian builder for wire messages.
class ByteWriter {
 public:
  ByteWriter& U8(uint8_t v);
  ByteWriter& U16(uint16_t v);
  ByteWriter& U32(uint32_t v);
  ByteWriter& U64(uint64_t v);
  ByteWriter& I32(int32_t v) { return U32(static_cast<uint32_t>(v)); }
  ByteWriter& I64(int64_t v) { return U64(static_cast<uint64_t>(v)); }
  ByteWriter& Append(ByteSpan bytes);
  ByteWriter& Append(std::string_view text);

  const Bytes& bytes() const { return out_; }
  Bytes Take() { return std::move(out_); }

 private:
  Bytes out_;
};

// Big-endian cursor over a received buffer. Every read fails with
// InvalidArgument once the buffer is exhausted.
class ByteReader {
 public:
  explicit ByteReader(ByteSpan in) : in_(in) {}

  absl::StatusOr<uint8_t> U8();
  absl::StatusOr<uint16_t> U16();
  absl::StatusOr<uint32_t> U32();
  absl::StatusOr<uint64_t> U64();
  absl::StatusOr<int32_t> I32();
  absl::StatusOr<int64_t> I64();
  absl::StatusOr<ByteSpan> Take(size_t n);

  template <typename Fixed>
  absl::StatusOr<Fixed> TakeFixed() {
    auto span = Take(Fixed::kSize);
    if (!span.ok()) return span.status();
    return Fixed::FromSpan(*span);
  }

  size_t remaining() const { return in_.size() - pos_; }
  ByteSpan rest() const { return in_.subspan(pos_); }

 private:
  ByteSpan in_;
  size_t pos_ = 0;
};

}  // namespace privatefind

#endif  // PRIVATEFIND_BYTES_H_
