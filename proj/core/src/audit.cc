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

#include "privatefind/audit.h"

#include <cstdint>
#include <limits>

#include "privatefind/network_protocol.h"
#include "privatefind/radio_protocol.h"

namespace privatefind {

namespace {

constexpr size_t kNoEnvelope = std::numeric_limits<size_t>::max();

void ScanPatterns(ByteSpan data, const AuditSpec& spec, size_t index,
                  AuditResult& result) {
  for (const GeoLocation& geo : spec.locations) {
    const auto encoded = geo.Encode();
    if (ContainsSubsequence(data, encoded)) {
      ++result.location_hits;
      result.findings.push_back(
          {index, "plaintext location " +
                      GeoLocation::FormatDegreesE7(geo.lat_e7) + "," +
                      GeoLocation::FormatDegreesE7(geo.lon_e7)});
    }
  }
  for (const Bytes& secret : spec.secrets) {
    if (!secret.empty() && ContainsSubsequence(data, secret)) {
      ++result.secret_hits;
      result.findings.push_back({index, "secret bytes on the wire"});
    }
  }
}

void CheckReportSchema(ByteSpan payload, const AuditSpec& spec, size_t index,
                       AuditResult& result) {
  auto frame = net::ParseFrame(payload);
  if (!frame.ok() || frame->code != net::Code::kFoundResponse) return;
  ++result.reports_checked;
  const size_t size = frame->payload.size();
  const bool token_allowed = TokenRequiredForIngest(spec.token_policy);
  const bool ok = size == net::kFoundResponseSize ||
                  (token_allowed && size == net::kFoundResponseSize + 32);
  if (!ok) {
    ++result.schema_violations;
    result.findings.push_back(
        {index, "FoundResponse payload of " + std::to_string(size) +
                    " bytes does not match the reporter schema"});
  }
}

}  // namespace

std::string AuditResult::SummaryLine() const {
  return "audit reports=" + std::to_string(reports_checked) +
         " location_hits=" + std::to_string(location_hits) +
         " secret_hits=" + std::to_string(secret_hits) +
         " schema_violations=" + std::to_string(schema_violations) +
         " verdict=" + (pass() ? "PASS" : "FAIL");
}

AuditResult AuditTranscript(const Transcript& transcript, const AuditSpec& spec,
                            const std::vector<Bytes>& extra_blobs) {
  AuditResult result;
  const auto& envelopes = transcript.envelopes();
  for (size_t i = 0; i < envelopes.size(); ++i) {
    const Envelope& env = envelopes[i];
    if (env.channel != Channel::kNetwork) continue;
    ScanPatterns(env.payload, spec, i, result);
    CheckReportSchema(env.payload, spec, i, result);
  }
  for (const Bytes& blob : extra_blobs) {
    ScanPatterns(blob, spec, kNoEnvelope, result);
  }
  return result;
}

}  // namespace privatefind
