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

#ifndef PRIVATEFIND_GEO_H_
#define PRIVATEFIND_GEO_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privatefind/bytes.h"

namespace privatefind {

// Fixed-point position in units of 1e-7 degrees.
struct GeoLocation {
  static constexpr int32_t kMaxLatE7 = 900'000'000;
  static constexpr int32_t kMaxLonE7 = 1'800'000'000;

  int32_t lat_e7 = 0;
  int32_t lon_e7 = 0;

  absl::Status Validate() const;
  // lat_e7 (int32 BE) || lon_e7 (int32 BE).
  std::array<uint8_t, 8> Encode() const;
  static absl::StatusOr<GeoLocation> Decode(ByteSpan bytes);

  // Exact decimal parse, e.g. "49.8728315" -> 498728315. At most seven
  // fractional digits; no floating point is involved.
  static absl::StatusOr<int32_t> ParseDegreesE7(std::string_view text);
  static absl::StatusOr<GeoLocation> FromDegrees(std::string_view lat,
                                                 std::string_view lon);
  static std::string FormatDegreesE7(int32_t value_e7);

  friend bool operator==(const GeoLocation&, const GeoLocation&) = default;
};

}  // namespace privatefind

#endif  // PRIVATEFIND_GEO_H_
