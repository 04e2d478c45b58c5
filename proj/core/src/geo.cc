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

#include "privatefind/geo.h"

#include <cstdlib>

namespace privatefind {

absl::Status GeoLocation::Validate() const {
  if (lat_e7 < -kMaxLatE7 || lat_e7 > kMaxLatE7) {
    return absl::InvalidArgumentError("latitude out of range");
  }
  if (lon_e7 < -kMaxLonE7 || lon_e7 > kMaxLonE7) {
    return absl::InvalidArgumentError("longitude out of range");
  }
  return absl::OkStatus();
}

std::array<uint8_t, 8> GeoLocation::Encode() const {
  ByteWriter w;
  w.I32(lat_e7).I32(lon_e7);
  std::array<uint8_t, 8> out{};
  std::copy(w.bytes().begin(), w.bytes().end(), out.begin());
  return out;
}

absl::StatusOr<GeoLocation> GeoLocation::Decode(ByteSpan bytes) {
  if (bytes.size() != 8) {
    return absl::InvalidArgumentError("geo encoding must be 8 bytes");
  }
  ByteReader r(bytes);
  GeoLocation geo{.lat_e7 = *r.I32(), .lon_e7 = *r.I32()};
  if (auto s = geo.Validate(); !s.ok()) return s;
  return geo;
}

absl::StatusOr<int32_t> GeoLocation::ParseDegreesE7(std::string_view text) {
  if (text.empty()) return absl::InvalidArgumentError("empty coordinate");
  bool negative = false;
  size_t i = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    i = 1;
  }
  int64_t whole = 0;
  size_t whole_digits = 0;
  for (; i < text.size() && text[i] != '.'; ++i) {
    if (text[i] < '0' || text[i] > '9') {
      return absl::InvalidArgumentError("bad coordinate: " + std::string(text));
    }
    whole = whole * 10 + (text[i] - '0');
    if (++whole_digits > 3) {
      return absl::InvalidArgumentError("coordinate out of range");
    }
  }
  if (whole_digits == 0) {
    return absl::InvalidArgumentError("bad coordinate: " + std::string(text));
  }
  int64_t frac = 0;
  int frac_digits = 0;
  if (i < text.size()) {
    for (++i; i < text.size(); ++i) {
      if (text[i] < '0' || text[i] > '9' || frac_digits == 7) {
        return absl::InvalidArgumentError("bad coordinate: " +
                                          std::string(text));
      }
      frac = frac * 10 + (text[i] - '0');
      ++frac_digits;
    }
    if (frac_digits == 0) {
      return absl::InvalidArgumentError("bad coordinate: " + std::string(text));
    }
  }
  for (; frac_digits < 7; ++frac_digits) frac *= 10;
  int64_t value = whole * 10'000'000 + frac;
  if (value > kMaxLonE7) return absl::InvalidArgumentError("out of range");
  return static_cast<int32_t>(negative ? -value : value);
}

absl::StatusOr<GeoLocation> GeoLocation::FromDegrees(std::string_view lat,
                                                     std::string_view lon) {
  auto lat_e7 = ParseDegreesE7(lat);
  if (!lat_e7.ok()) return lat_e7.status();
  auto lon_e7 = ParseDegreesE7(lon);
  if (!lon_e7.ok()) return lon_e7.status();
  GeoLocation geo{.lat_e7 = *lat_e7, .lon_e7 = *lon_e7};
  if (auto s = geo.Validate(); !s.ok()) return s;
  return geo;
}

std::string GeoLocation::FormatDegreesE7(int32_t value_e7) {
  int64_t v = value_e7;
  std::string out = v < 0 ? "-" : "";
  v = std::llabs(v);
  std::string frac = std::to_string(v % 10'000'000);
  out += std::to_string(v / 10'000'000) + "." +
         std::string(7 - frac.size(), '0') + frac;
  return out;
}

}  // namespace privatefind
