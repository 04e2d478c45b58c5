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

#ifndef PRIVATEFIND_AUDIT_H_
#define PRIVATEFIND_AUDIT_H_

#include <string>
#include <vector>

#include "privatefind/bytes.h"
#include "privatefind/geo.h"
#include "privatefind/server.h"
#include "privatefind/transport.h"

namespace privatefind {

struct AuditSpec {
  // Plaintext locations that must never appear on the network channel.
  std::vector<GeoLocation> locations;
  // Further byte strings that must never appear (e.g. owner keys).
  std::vector<Bytes> secrets;
  // Whether FoundResponse may carry an access token.
  TokenPolicy token_policy = TokenPolicy::kOff;
};

struct AuditFinding {
  size_t envelope_index = 0;  // or SIZE_MAX for extra blobs
  std::string what;
};

struct AuditResult {
  size_t location_hits = 0;
  size_t secret_hits = 0;
  size_t schema_violations = 0;
  size_t reports_checked = 0;
  std::vector<AuditFinding> findings;

  bool pass() const {
    return location_hits == 0 && secret_hits == 0 && schema_violations == 0;
  }
  // "audit reports=.. location_hits=.. ... verdict=PASS"
  std::string SummaryLine() const;
};

// Scans every network-channel payload for forbidden byte patterns and checks
// each FoundResponse frame against the reporter schema: exactly
// id_rand || e2e_message, plus a token only when the policy allows one.
// `extra_blobs` (e.g. persisted server state) are scanned for patterns only.
AuditResult AuditTranscript(const Transcript& transcript, const AuditSpec& spec,
                            const std::vector<Bytes>& extra_blobs = {});

}  // namespace privatefind

#endif  // PRIVATEFIND_AUDIT_H_
