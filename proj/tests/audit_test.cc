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

#include "gtest/gtest.h"
#include "privatefind/network_protocol.h"
#include "privatefind/radio_protocol.h"
#include "test_util.h"

namespace privatefind {
namespace {

const GeoLocation kHome{.lat_e7 = 525200066, .lon_e7 = 134049540};

Bytes HonestReport() {
  DeterministicRandom rng(1, "seal");
  return net::Encode(net::FoundResponse{
      LocationReport{Identifier::Filled(1),
                     Seal(SecretKey::Filled(2),
                          radio::EncodeReportPlaintext(kHome, 1), rng)},
      std::nullopt});
}

Transcript WithNetworkPayload(Bytes payload) {
  Transcript t;
  t.Append(Envelope{.src = "bob",
                    .dst = "server",
                    .channel = Channel::kNetwork,
                    .payload = std::move(payload)});
  return t;
}

AuditSpec Spec() {
  AuditSpec spec;
  spec.locations = {kHome};
  spec.secrets = {testing::ToVector(SecretKey::Filled(2).span())};
  return spec;
}

TEST(AuditTest, HonestReportPasses) {
  AuditResult result = AuditTranscript(WithNetworkPayload(HonestReport()),
                                       Spec());
  EXPECT_TRUE(result.pass());
  EXPECT_EQ(result.reports_checked, 1u);
  EXPECT_EQ(result.SummaryLine(),
            "audit reports=1 location_hits=0 secret_hits=0 "
            "schema_violations=0 verdict=PASS");
}

TEST(AuditTest, PlaintextLocationFails) {
  Bytes payload = HonestReport();
  const auto encoded = kHome.Encode();
  payload.insert(payload.end(), encoded.begin(), encoded.end());
  AuditResult result = AuditTranscript(WithNetworkPayload(payload), Spec());
  EXPECT_FALSE(result.pass());
  EXPECT_EQ(result.location_hits, 1u);
}

TEST(AuditTest, ExtraFieldViolatesSchema) {
  Bytes payload = HonestReport();
  payload.push_back(0x00);
  payload[4] += 1;  // header length 93
  AuditResult result = AuditTranscript(WithNetworkPayload(payload), Spec());
  EXPECT_FALSE(result.pass());
  EXPECT_EQ(result.schema_violations, 1u);
  ASSERT_EQ(result.findings.size(), 1u);
  EXPECT_EQ(result.findings[0].envelope_index, 0u);
}

TEST(AuditTest, TokenOnlyAllowedWhenPolicyRequiresIt) {
  DeterministicRandom rng(1, "seal");
  Bytes with_token = net::Encode(net::FoundResponse{
      LocationReport{Identifier::Filled(1),
                     Seal(SecretKey::Filled(2),
                          radio::EncodeReportPlaintext(kHome, 1), rng)},
      net::AccessToken{}});
  AuditSpec spec = Spec();
  EXPECT_FALSE(AuditTranscript(WithNetworkPayload(with_token), spec).pass());
  spec.token_policy = TokenPolicy::kIngest;
  EXPECT_TRUE(AuditTranscript(WithNetworkPayload(with_token), spec).pass());
}

TEST(AuditTest, SecretsOnTheWireFail) {
  Bytes payload(10, 0xEE);
  Bytes key = testing::ToVector(SecretKey::Filled(2).span());
  payload.insert(payload.end(), key.begin(), key.end());
  AuditResult result = AuditTranscript(WithNetworkPayload(payload), Spec());
  EXPECT_EQ(result.secret_hits, 1u);
  EXPECT_FALSE(result.pass());
}

TEST(AuditTest, RadioTrafficAndExtraBlobs) {
  Transcript t;
  Bytes radio_payload = radio::Encode(radio::AreYouLost{kHome});
  t.Append(Envelope{.src = "bob",
                    .dst = "f",
                    .channel = Channel::kRadio,
                    .payload = radio_payload});
  EXPECT_TRUE(AuditTranscript(t, Spec()).pass());
  const auto encoded = kHome.Encode();
  Bytes blob(encoded.begin(), encoded.end());
  AuditResult result = AuditTranscript(t, Spec(), {blob});
  EXPECT_FALSE(result.pass());
}

}  // namespace
}  // namespace privatefind
