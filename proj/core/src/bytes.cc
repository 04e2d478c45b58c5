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

#include "privatefind/bytes.h"

#include <algorithm>

namespace privatefind {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string HexEncode(ByteSpan bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

absl::StatusOr<Bytes> HexDecode(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    return absl::InvalidArgumentError("hex string has odd length");
  }
  Bytes out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    int hi = HexValue(hex[i]);
    int lo = HexValue(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      return absl::InvalidArgumentError("invalid hex digit");
    }
    out.push_back(static_cast<uint8_t>((hi << 4) | lo));
  }
  return out;
}

bool ContainsSubsequence(ByteSpan haystack, ByteSpan needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

ByteWriter& ByteWriter::U8(uint8_t v) {
  out_.push_back(v);
  return *this;
}

ByteWriter& ByteWriter::U16(uint16_t v) {
  out_.push_back(static_cast<uint8_t>(v >> 8));
  out_.push_back(static_cast<uint8_t>(v));
  return *this;
}

ByteWriter& ByteWriter::U32(uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<uint8_t>(v >> shift));
  }
  return *this;
}

ByteWriter& ByteWriter::U64(uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<uint8_t>(v >> shift));
  }
  return *this;
}

ByteWriter& ByteWriter::Append(ByteSpan bytes) {
  out_.insert(out_.end(), bytes.begin(), bytes.end());
  return *this;
}

ByteWriter& ByteWriter::Append(std::string_view text) {
  out_.insert(out_.end(), text.begin(), text.end());
  return *this;
}

absl::StatusOr<ByteSpan> ByteReader::Take(size_t n) {
  if (remaining() < n) {
    return absl::InvalidArgumentError("truncated message");
  }
  ByteSpan out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

absl::StatusOr<uint8_t> ByteReader::U8() {
  auto span = Take(1);
  if (!span.ok()) return span.status();
  return (*span)[0];
}

absl::StatusOr<uint16_t> ByteReader::U16() {
  auto span = Take(2);
  if (!span.ok()) return span.status();
  return static_cast<uint16_t>(((*span)[0] << 8) | (*span)[1]);
}

absl::StatusOr<uint32_t> ByteReader::U32() {
  auto span = Take(4);
  if (!span.ok()) return span.status();
  uint32_t v = 0;
  for (uint8_t b : *span) v = (v << 8) | b;
  return v;
}

absl::StatusOr<uint64_t> ByteReader::U64() {
  auto span = Take(8);
  if (!span.ok()) return span.status();
  uint64_t v = 0;
  for (uint8_t b : *span) v = (v << 8) | b;
  return v;
}

absl::StatusOr<int32_t> ByteReader::I32() {
  auto v = U32();
  if (!v.ok()) return v.status();
  return static_cast<int32_t>(*v);
}

absl::StatusOr<int64_t> ByteReader::I64() {
  auto v = U64();
  if (!v.ok()) return v.status();
  return static_cast<int64_t>(*v);
}

}  // namespace privatefind
