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

#include "privatefind/random.h"

#include <openssl/crypto.h>
#include <openssl/rand.h>

#include <algorithm>
#include <stdexcept>

#include "privatefind/bytes.h"
#include "privatefind/crypto.h"

namespace privatefind {

uint64_t RandomSource::NextU64() {
  std::array<uint8_t, 8> buf;
  Fill(buf);
  uint64_t v = 0;
  for (uint8_t b : buf) v = (v << 8) | b;
  return v;
}

double RandomSource::NextDouble() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

uint64_t RandomSource::NextBelow(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("NextBelow(0)");
  // Rejection sampling keeps the result unbiased.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t v;
  do {
    v = NextU64();
  } while (v >= limit);
  return v % bound;
}

void SystemRandom::Fill(std::span<uint8_t> out) {
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
}

DeterministicRandom::DeterministicRandom(uint64_t seed,
                                         std::string_view label) {
  ByteWriter seed_bytes;
  seed_bytes.U64(seed);
  ByteSpan label_bytes(reinterpret_cast<const uint8_t*>(label.data()),
                       label.size());
  key_ = HmacSha256(seed_bytes.bytes(), label_bytes);
  block_.fill(0);
}

DeterministicRandom::~DeterministicRandom() {
  OPENSSL_cleanse(key_.data(), key_.size());
  OPENSSL_cleanse(block_.data(), block_.size());
}

void DeterministicRandom::Refill() {
  ByteWriter counter;
  counter.U64(counter_++);
  block_ = HmacSha256(key_, counter.bytes());
  used_ = 0;
}

void DeterministicRandom::Fill(std::span<uint8_t> out) {
  size_t written = 0;
  while (written < out.size()) {
    if (used_ == block_.size()) Refill();
    size_t n = std::min(out.size() - written, block_.size() - used_);
    std::copy_n(block_.begin() + used_, n, out.begin() + written);
    used_ += n;
    written += n;
  }
}

}  // namespace privatefind
