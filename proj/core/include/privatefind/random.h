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

#ifndef PRIVATEFIND_RANDOM_H_
#define PRIVATEFIND_RANDOM_H_

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace privatefind {

// Source of random bytes for keys, nonces and identifiers.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void Fill(std::span<uint8_t> out) = 0;

  uint64_t NextU64();
  // Uniform in [0, 1).
  double NextDouble();
  // Uniform in [0, bound). `bound` must be non-zero.
  uint64_t NextBelow(uint64_t bound);
};

// Operating-system randomness (OpenSSL RAND_bytes).
class SystemRandom final : public RandomSource {
 public:
  void Fill(std::span<uint8_t> out) override;
};

// Counter-mode HMAC-SHA256 generator keyed by (seed, label). Two instances
// with the same seed and label produce the same stream; distinct labels give
// independent streams, so every simulated actor can own one.
class DeterministicRandom final : public RandomSource {
 public:
  DeterministicRandom(uint64_t seed, std::string_view label);
  ~DeterministicRandom() override;

  DeterministicRandom(const DeterministicRandom&) = delete;
  DeterministicRandom& operator=(const DeterministicRandom&) = delete;

  void Fill(std::span<uint8_t> out) override;

 private:
  void Refill();

  std::array<uint8_t, 32> key_;
  std::array<uint8_t, 32> block_;
  uint64_t counter_ = 0;
  size_t used_ = 32;
};

}  // namespace privatefind

#endif  // PRIVATEFIND_RANDOM_H_
