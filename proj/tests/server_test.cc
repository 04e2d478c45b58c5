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

#include "privatefind/server.h"

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <unistd.h>

#include "gtest/gtest.h"
#include "privatefind/errors.h"
#include "privatefind/network_protocol.h"
#include "privatefind/radio_protocol.h"
#include "privatefind/server_log.h"
#include "test_util.h"

namespace privatefind {
namespace {

using ::privatefind::testing::Hex;

const Identifier kIdInit = Identifier::Filled(0x02);
const SecretKey kMfKey = SecretKey::Filled(0x03);
const SecretKey kE2eKey = SecretKey::Filled(0x01);

ManufacturerRegistry MakeRegistry() {
  ManufacturerRegistry registry;
  registry.Add(kIdInit, kMfKey);
  return registry;
}

std::unique_ptr<Server> MakeServer(ServerConfig config = {}) {
  auto server = Server::Create(config, MakeRegistry(),
                               std::make_unique<DeterministicRandom>(1, "srv"));
  EXPECT_TRUE(server.ok()) << server.status();
  return *std::move(server);
}

net::FoundResponse MakeReport(uint8_t id_fill, uint32_t counter = 1) {
  DeterministicRandom rng(counter, "seal");
  return net::FoundResponse{
      LocationReport{Identifier::Filled(id_fill),
                     Seal(kE2eKey,
                          radio::EncodeReportPlaintext(GeoLocation{}, counter),
                          rng)},
      std::nullopt};
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("pf-server-test-" + std::to_string(::getpid()) + "-" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string File(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

TEST(TokenPolicyTest, NamesRoundTrip) {
  for (TokenPolicy p : {TokenPolicy::kOff, TokenPolicy::kIngest,
                        TokenPolicy::kSearch, TokenPolicy::kBoth}) {
    auto parsed = ParseTokenPolicy(TokenPolicyName(p));
    ASSERT_TRUE(parsed.ok());
    EXPECT_EQ(*parsed, p);
  }
  EXPECT_FALSE(ParseTokenPolicy("always").ok());
  EXPECT_FALSE(TokenRequiredForIngest(TokenPolicy::kSearch));
  EXPECT_TRUE(TokenRequiredForSearch(TokenPolicy::kBoth));
}

TEST(ManufacturerRegistryTest, JsonLinesRoundTrip) {
  ManufacturerRegistry registry = MakeRegistry();
  registry.Add(Identifier::Filled(0x10), SecretKey::Filled(0x11));
  auto parsed = ManufacturerRegistry::FromJsonLines(registry.ToJsonLines());
  ASSERT_TRUE(parsed.ok());
  EXPECT_EQ(parsed->size(), 2u);
  ASSERT_NE(parsed->Find(kIdInit), nullptr);
  EXPECT_EQ(*parsed->Find(kIdInit), kMfKey);
  EXPECT_EQ(parsed->Find(Identifier::Filled(0x99)), nullptr);
  EXPECT_FALSE(ManufacturerRegistry::FromJsonLines("{\"id_init\":\"00\"}\n")
                   .ok());
}

TEST(ServerTest, RegisterInitWrapsSetupKey) {
  auto server = MakeServer();
  auto reply = server->RegisterInit(net::RegisterInit{kIdInit});
  ASSERT_TRUE(reply.ok());
  auto unwrapped = Open(kMfKey, reply->wrapped);
  ASSERT_TRUE(unwrapped.ok());
  EXPECT_EQ(*unwrapped, testing::ToVector(reply->setup_key.span()));
  EXPECT_EQ(
      KindOf(server->RegisterInit(net::RegisterInit{Identifier::Filled(9)})
                 .status()),
      ErrorKind::kServerUnknownFinder);
}

TEST(ServerTest, IngestAckIsIdenticalForAnyWellFormedReport) {
  auto server = MakeServer();
  const Bytes a = server->HandleFrame(net::Encode(MakeReport(1)), 0);
  const Bytes b = server->HandleFrame(net::Encode(MakeReport(2)), 0);
  const Bytes dup = server->HandleFrame(net::Encode(MakeReport(1)), 0);
  EXPECT_EQ(Hex(a), "130000000100");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, dup);
  EXPECT_EQ(server->reports().size(), 3u);
}

TEST(ServerTest, TruncatedReportIsMalformed) {
  auto server = MakeServer();
  Bytes frame = net::Encode(MakeReport(1));
  frame.pop_back();
  frame[4] -= 1;  // keep the header length consistent: 91-byte payload
  Bytes reply = server->HandleFrame(frame, 0);
  auto decoded = net::Decode(reply);
  ASSERT_TRUE(decoded.ok());
  ASSERT_TRUE(std::holds_alternative<net::Error>(*decoded));
  EXPECT_EQ(std::get<net::Error>(*decoded).code,
            net::ErrorCode::kMalformedReport);
  EXPECT_TRUE(server->reports().empty());

  net::FoundResponse short_box = MakeReport(1);
  short_box.report.e2e_message.ciphertext.pop_back();
  EXPECT_EQ(KindOf(server->Ingest(short_box, 0)), ErrorKind::kMalformedReport);
}

TEST(ServerTest, SearchNewestFirstAndTtl) {
  ServerConfig config;
  config.report_ttl_ms = 1000;
  auto server = MakeServer(config);
  ASSERT_TRUE(server->Ingest(MakeReport(1, 1), 0).ok());
  ASSERT_TRUE(server->Ingest(MakeReport(2, 1), 10).ok());
  ASSERT_TRUE(server->Ingest(MakeReport(1, 2), 500).ok());
  auto found = server->Search(net::Search{{Identifier::Filled(1)}, {}}, 900);
  ASSERT_TRUE(found.ok());
  ASSERT_EQ(found->size(), 2u);
  EXPECT_EQ((*found)[0].received_at_ms, 500);
  EXPECT_EQ((*found)[1].received_at_ms, 0);
  found = server->Search(net::Search{{Identifier::Filled(1)}, {}}, 1001);
  ASSERT_TRUE(found.ok());
  ASSERT_EQ(found->size(), 1u);
  EXPECT_EQ((*found)[0].received_at_ms, 500);
}

TEST(ServerTest, SearchIdLimit) {
  auto server = MakeServer();
  std::vector<Identifier> ids(64, Identifier::Filled(1));
  EXPECT_TRUE(server->Search(net::Search{ids, {}}, 0).ok());
  ids.push_back(Identifier::Filled(2));
  EXPECT_EQ(KindOf(server->Search(net::Search{ids, {}}, 0).status()),
            ErrorKind::kTooManyIds);
}

TEST(ServerTest, TokenChallengeFlow) {
  ServerConfig config;
  config.token_policy = TokenPolicy::kBoth;
  auto server = MakeServer(config);
  EXPECT_EQ(KindOf(server->Ingest(MakeReport(1), 0)),
            ErrorKind::kTokenRequired);
  EXPECT_EQ(KindOf(server->Search(net::Search{{kIdInit}, {}}, 0).status()),
            ErrorKind::kTokenRequired);

  auto challenge = server->IssueChallenge(kIdInit);
  ASSERT_TRUE(challenge.ok());
  ASSERT_TRUE(challenge->challenge.has_value());
  auto plaintext = Open(kMfKey, *challenge->challenge);
  ASSERT_TRUE(plaintext.ok());
  ASSERT_EQ(plaintext->size(), radio::kTokenChallengePlaintextSize);
  EXPECT_EQ(std::string(plaintext->begin(), plaintext->begin() + 8),
            "pf-token");

  net::TokenResponse wrong{kIdInit, {}};
  EXPECT_EQ(KindOf(server->RedeemChallenge(wrong).status()),
            ErrorKind::kAuthFailure);

  net::TokenResponse answer{kIdInit, {}};
  std::copy(plaintext->begin() + 8, plaintext->end(), answer.nonce.begin());
  auto token = server->RedeemChallenge(answer);
  ASSERT_TRUE(token.ok());
  EXPECT_EQ(server->token_count(), 1u);
  // Each challenge redeems once.
  EXPECT_FALSE(server->RedeemChallenge(answer).ok());

  net::FoundResponse with_token = MakeReport(1);
  with_token.token = *token;
  EXPECT_TRUE(server->Ingest(with_token, 0).ok());
  EXPECT_TRUE(server->Search(net::Search{{kIdInit}, *token}, 0).ok());
  EXPECT_EQ(KindOf(server->IssueChallenge(Identifier::Filled(7)).status()),
            ErrorKind::kServerUnknownFinder);
}

TEST(ServerTest, LostListExpires) {
  auto server = MakeServer();
  const std::vector<Identifier> ids = {Identifier::Filled(1),
                                       Identifier::Filled(2)};
  ASSERT_TRUE(server->MarkLost(ids, 0).ok());
  EXPECT_EQ(server->LostIds(0).size(), 2u);
  EXPECT_EQ(server->LostIds(2 * 900000 - 1).size(), 2u);
  EXPECT_TRUE(server->LostIds(2 * 900000).empty());
  ASSERT_TRUE(server->ClearLost({&ids[0], 1}).ok());
  EXPECT_EQ(server->LostIds(0), std::vector<Identifier>{ids[1]});
}

TEST(ServerTest, RejectsReplyFramesAsRequests) {
  auto server = MakeServer();
  Bytes reply = server->HandleFrame(net::Encode(net::GenericAck{}), 0);
  auto decoded = net::Decode(reply);
  ASSERT_TRUE(decoded.ok());
  EXPECT_TRUE(std::holds_alternative<net::Error>(*decoded));
}

TEST(ServerLogTest, SerializeParseRoundTrip) {
  std::vector<LogEvent> events = {
      log_event::Report{StoredReport{Identifier::Filled(1),
                                     MakeReport(1).report.e2e_message, 42}},
      log_event::MarkLost{Identifier::Filled(2), 99},
      log_event::ClearLost{Identifier::Filled(3)},
      log_event::Token{net::AccessToken{1, 2, 3}},
  };
  for (const LogEvent& event : events) {
    auto parsed = ServerLog::Parse(ServerLog::Serialize(event));
    ASSERT_TRUE(parsed.ok());
    EXPECT_EQ(ServerLog::Serialize(*parsed), ServerLog::Serialize(event));
  }
  EXPECT_FALSE(ServerLog::Parse("{\"event\":\"nope\"}").ok());
}

TEST(ServerLogTest, RestartReplaysState) {
  TempDir dir;
  ServerConfig config;
  config.log_path = dir.File("server.log");
  {
    auto server = MakeServer(config);
    ASSERT_TRUE(server->Ingest(MakeReport(1), 5).ok());
    ASSERT_TRUE(server->MarkLost(std::vector{Identifier::Filled(1)}, 0).ok());
  }
  auto restarted = MakeServer(config);
  ASSERT_EQ(restarted->reports().size(), 1u);
  EXPECT_EQ(restarted->reports()[0].received_at_ms, 5);
  EXPECT_EQ(restarted->LostIds(0).size(), 1u);
}

TEST(ServerLogTest, TornFinalLineIsDropped) {
  TempDir dir;
  const std::string path = dir.File("server.log");
  {
    std::ofstream out(path);
    out << ServerLog::Serialize(log_event::ClearLost{Identifier::Filled(3)})
        << "\n{\"event\":\"mark_lo";
  }
  auto log = ServerLog::Open(path);
  ASSERT_TRUE(log.ok()) << log.status();
  EXPECT_EQ(log->replayed().size(), 1u);
  ASSERT_TRUE(log->Append(log_event::ClearLost{Identifier::Filled(4)}).ok());
  auto reopened = ServerLog::Open(path);
  ASSERT_TRUE(reopened.ok()) << reopened.status();
  EXPECT_EQ(reopened->replayed().size(), 2u);
}

TEST(ServerLogTest, CorruptMiddleLineIsAnError) {
  TempDir dir;
  const std::string path = dir.File("server.log");
  {
    std::ofstream out(path);
    out << "garbage\n"
        << ServerLog::Serialize(log_event::ClearLost{Identifier::Filled(3)})
        << "\n";
  }
  EXPECT_FALSE(ServerLog::Open(path).ok());
}

}  // namespace
}  // namespace privatefind
