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

#ifndef PRIVATEFIND_REPORT_H_
#define PRIVATEFIND_REPORT_H_

#include <cstdint>

#include "privatefind/crypto.h"

namespace privatefind {

// What a reporter relays and the server stores: the finder's current
// pseudonym and the sealed location. Opaque to everyone but the owner.
struct LocationReport {
  Identifier id_rand;
  SealedBox e2e_message;

  friend bool operator==(const LocationReport&,
                         const LocationReport&) = default;
};

// A report as returned by a server search.
struct StoredReport {
  Identifier id_rand;
  SealedBox e2e_message;
  int64_t received_at_ms = 0;

  friend bool operator==(const StoredReport&, const StoredReport&) = default;
};

}  // namespace privatefind

#endif  // PRIVATEFIND_REPORT_H_
