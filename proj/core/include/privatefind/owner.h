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

#ifndef PRIVATEFIND_OWNER_H_
#define PRIVATEFIND_OWNER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privatefind/crypto.h"
#include "privatefind/geo.h"
#include "privatefind/phone.h"
#include "privatefind/random.h"
#include "privatefind/report.h"
#include "privatefind/transport.h"

namespace privatefind {

// A location report that decrypted under the owner's key and passed the
// replay watermark. Always anonymous: nothing identifies the reporter.
struct VerifiedReport {
  Identifier id_rand;
  GeoLocation geo;
  uint32_t counter = 0;
  int64_t received_at_ms = 0;
  bool anonymous = true;

  friend bool operator==(const VerifiedReport&,
                         const VerifiedReport&) = default;
};

struct LastKnownLocation {
  GeoLocation geo;
  int64_t at_ms = 0;
};

// The owner phone's binding to one finder. Lives only on the phone; the
// export blob is the only serialized form.
struct OwnerRecord {
  Identifier id_init;
  SecretKey e2e_key;
  int64_t setup_time_ms = 0;
  int64_t epoch_ms = kDefaultEpochMs;
  // Non-decreasing.
  uint32_t last_counter_seen = 0;
  std::optional<LastKnownLocation> last_known_location;
  bool opt_out_shadow = false;
  // Static address learned during setup; unknown after an import.
  std::optional<LinkAddress> finder_address;
  std::vector<VerifiedReport> accepted;
};

struct WindowSlack {
  uint32_t back = 4;
  uint32_t forward = 1;
};

uint64_t CurrentEpoch(const OwnerRecord& record, int64_t now_ms);

// id_rand values for epochs [current - back, current + forward], oldest
// first. Epochs before zero do not exist, so the window is shorter during
// the first `back` epochs after setup.
std::vector<Identifier> CurrentIdWindow(const OwnerRecord& record,
                                        int64_t now_ms,
                                        WindowSlack slack = {});

// Decrypts `found` and keeps only reports whose counter is above the
// watermark, in increasing counter order. Advances the watermark and the
// last known location. Undecryptable and replayed reports are dropped.
std::vector<VerifiedReport> AcceptReports(OwnerRecord& record,
                                          std::span<const StoredReport> found);

struct OwnerOptions {
  std::string server = "server";
  int64_t epoch_ms = kDefaultEpochMs;
  bool mac_randomization = false;
  WindowSlack slack;
};

// Owner side of the protocol running on one phone. Records are keyed by a
// caller-chosen label.
class OwnerApp {
 public:
  OwnerApp(Phone& phone, Simulation& sim, RandomSource& rng,
           OwnerOptions options = {});

  // Local variant: Setup(e2e_key) -> SetupOK(id_init). Replaces any
  // existing record under `label`. Timeout if the finder is not armed.
  absl::StatusOr<const OwnerRecord*> SetupLocal(const std::string& label,
                                                const LinkAddress& finder,
                                                bool reset_id_init = false);

  // Manufacturer-verified variant: IdentityRead, RegisterInit at the server,
  // forward the wrapped setup key, then Setup/SetupOK sealed under the
  // setup key. AuthFailure if the finder cannot unwrap the key.
  absl::StatusOr<const OwnerRecord*> SetupVerified(const std::string& label,
                                                   const LinkAddress& finder);

  absl::StatusOr<std::vector<VerifiedReport>> FetchAndDecrypt(
      const std::string& label);

  absl::Status MarkLost(const std::string& label);
  absl::Status ClearLost(const std::string& label);

  // Sends an epoch-bound, HMAC-authenticated opt-out change.
  absl::Status SetOptOut(const std::string& label, bool opt_out);

  // Relays a server challenge to the finder and stores the resulting token
  // on the phone.
  absl::StatusOr<net::AccessToken> RequestToken(const std::string& label);

  absl::StatusOr<std::string> ExportIdentity(const std::string& label) const;
  absl::StatusOr<const OwnerRecord*> ImportIdentity(const std::string& label,
                                                    std::string_view blob);

  // Where the bound finder is expected to be on radio right now.
  std::optional<LinkAddress> ExpectedAddress(const OwnerRecord& record) const;
  std::vector<LinkAddress> KnownFinderAddresses() const;

  const OwnerRecord* record(const std::string& label) const;
  const std::map<std::string, OwnerRecord>& records() const {
    return records_;
  }

 private:
  absl::StatusOr<OwnerRecord*> MutableRecord(const std::string& label);
  absl::StatusOr<const OwnerRecord*> Store(const std::string& label,
                                           OwnerRecord record,
                                           const LinkAddress& finder);

  Phone& phone_;
  Simulation& sim_;
  RandomSource& rng_;
  OwnerOptions options_;
  std::map<std::string, OwnerRecord> records_;
};

}  // namespace privatefind

#endif  // PRIVATEFIND_OWNER_H_
