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

#include "privatefind/owner.h"

#include <algorithm>
#include <vector>

#include "gtest/gtest.h"
#include "privatefind/crypto.h"
#include "privatefind/errors.h"
#include "privatefind/radio_protocol.h"
#include "test_util.h"
#include "world.h"

namespace privatefind {
namespace {

using ::privatefind::testing::World;

constexpr int64_t kEpoch = kDefaultEpochMs;

OwnerRecord MakeRecord() {
  OwnerRecord record;
  record.id_init = Identifier::Filled(0x02);
  record.e2e_key = SecretKey::Filled(0x01);
  record.setup_time_ms = 1000;
  return record;
}

StoredReport MakeReport(const OwnerRecord& record, uint32_t counter,
                        int64_t received_at, uint64_t seed = 1) {
  DeterministicRandom rng(seed, "seal");
  GeoLocation geo{.lat_e7 = 100 + static_cast<int32_t>(counter), .lon_e7 = 7};
  return StoredReport{
      .id_rand = RatchetFirst(record.e2e_key, record.id_init),
      .e2e_message = Seal(record.e2e_key,
                          radio::EncodeReportPlaintext(geo, counter), rng),
      .received_at_ms = received_at};
}

TEST(CurrentEpochTest, CountsWholeEpochsSinceSetup) {
  OwnerRecord record = MakeRecord();
  EXPECT_EQ(CurrentEpoch(record, 0), 0u);
  EXPECT_EQ(CurrentEpoch(record, 1000 + kEpoch - 1), 0u);
  EXPECT_EQ(CurrentEpoch(record, 1000 + kEpoch), 1u);
  EXPECT_EQ(CurrentEpoch(record, 1000 + 10 * kEpoch + 5), 10u);
}

TEST(CurrentIdWindowTest, ClampedAtEpochZero) {
  OwnerRecord record = MakeRecord();
  std::vector<Identifier> window = CurrentIdWindow(record, 1000);
  ASSERT_EQ(window.size(), 2u);  // epochs 0 and 1
  EXPECT_EQ(window[0], RatchetAt(record.e2e_key, record.id_init, 0));
  EXPECT_EQ(window[1], RatchetAt(record.e2e_key, record.id_init, 1));
  EXPECT_EQ(CurrentIdWindow(record, 1000 + 2 * kEpoch).size(), 4u);
}

TEST(CurrentIdWindowTest, FullWindowCoversBackAndForward) {
  OwnerRecord record = MakeRecord();
  std::vector<Identifier> window = CurrentIdWindow(record, 1000 + 10 * kEpoch);
  ASSERT_EQ(window.size(), 6u);  // epochs 6..11
  for (size_t i = 0; i < window.size(); ++i) {
    EXPECT_EQ(window[i], RatchetAt(record.e2e_key, record.id_init, 6 + i));
  }
  std::vector<Identifier> narrow = CurrentIdWindow(
      record, 1000 + 10 * kEpoch, WindowSlack{.back = 0, .forward = 0});
  ASSERT_EQ(narrow.size(), 1u);
  EXPECT_EQ(narrow[0], RatchetAt(record.e2e_key, record.id_init, 10));
}

TEST(AcceptReportsTest, OrdersByCounterAndAdvancesWatermark) {
  OwnerRecord record = MakeRecord();
  std::vector<StoredReport> found = {MakeReport(record, 3, 300),
                                     MakeReport(record, 1, 100),
                                     MakeReport(record, 2, 200)};
  auto accepted = AcceptReports(record, found);
  ASSERT_EQ(accepted.size(), 3u);
  EXPECT_EQ(accepted[0].counter, 1u);
  EXPECT_EQ(accepted[2].counter, 3u);
  EXPECT_TRUE(accepted[2].anonymous);
  EXPECT_EQ(record.last_counter_seen, 3u);
  ASSERT_TRUE(record.last_known_location.has_value());
  EXPECT_EQ(record.last_known_location->geo.lat_e7, 103);
  EXPECT_EQ(record.last_known_location->at_ms, 300);

  // Replays of already-seen counters are dropped.
  EXPECT_TRUE(AcceptReports(record, found).empty());
  EXPECT_EQ(record.last_counter_seen, 3u);
}

TEST(AcceptReportsTest, DuplicateCounterAcceptedOnce) {
  OwnerRecord record = MakeRecord();
  std::vector<StoredReport> found = {MakeReport(record, 5, 100, 1),
                                     MakeReport(record, 5, 200, 2)};
  auto accepted = AcceptReports(record, found);
  ASSERT_EQ(accepted.size(), 1u);
  EXPECT_EQ(accepted[0].received_at_ms, 100);
}

TEST(AcceptReportsTest, ForgedAndTamperedReportsDropped) {
  OwnerRecord record = MakeRecord();
  OwnerRecord stranger = MakeRecord();
  stranger.e2e_key = SecretKey::Filled(0x09);
  StoredReport tampered = MakeReport(record, 4, 10);
  tampered.e2e_message.ciphertext[0] ^= 0x01;
  std::vector<StoredReport> found = {MakeReport(stranger, 9, 5), tampered};
  EXPECT_TRUE(AcceptReports(record, found).empty());
  EXPECT_EQ(record.last_counter_seen, 0u);
  EXPECT_FALSE(record.last_known_location.has_value());
}

TEST(OwnerAppTest, SetupLocalTimesOutWithoutButton) {
  World world;
  ASSERT_TRUE(world.sim.SetRange("alice", {"tag"}).ok());
  auto result = world.owner->SetupLocal("tag", world.finder->link_address());
  EXPECT_EQ(KindOf(result.status()), ErrorKind::kTimeout);
  EXPECT_EQ(world.owner->record("tag"), nullptr);
}

TEST(OwnerAppTest, SetupLocalStoresBinding) {
  World world;
  world.SetUpAndLeave();
  const OwnerRecord* record = world.owner->record("tag");
  ASSERT_NE(record, nullptr);
  EXPECT_EQ(record->id_init, world.finder->state().id_init);
  EXPECT_EQ(record->e2e_key, *world.finder->state().e2e_key);
  EXPECT_EQ(record->last_counter_seen, 0u);
}

TEST(OwnerAppTest, SetupVerifiedAgainstRegistry) {
  World world;
  ASSERT_TRUE(world.sim.SetRange("alice", {"tag"}).ok());
  world.finder->PressButtonHold(0);
  auto record = world.owner->SetupVerified("tag", world.finder->link_address());
  ASSERT_TRUE(record.ok()) << record.status();
  EXPECT_EQ((*record)->e2e_key, *world.finder->state().e2e_key);
}

TEST(OwnerAppTest, MarkAndClearLostWithTtl) {
  World world;
  world.SetUpAndLeave();
  ASSERT_TRUE(world.owner->MarkLost("tag").ok());
  const OwnerRecord* record = world.owner->record("tag");
  auto window = CurrentIdWindow(*record, world.sim.now_ms());
  auto lost = world.server->LostIds(world.sim.now_ms());
  std::sort(window.begin(), window.end());
  std::sort(lost.begin(), lost.end());
  EXPECT_EQ(lost, window);

  ASSERT_TRUE(world.owner->ClearLost("tag").ok());
  EXPECT_TRUE(world.server->LostIds(world.sim.now_ms()).empty());

  ASSERT_TRUE(world.owner->MarkLost("tag").ok());
  EXPECT_FALSE(world.server->LostIds(2 * kEpoch - 1).empty());
  EXPECT_TRUE(world.server->LostIds(2 * kEpoch).empty());
}

TEST(OwnerAppTest, UnknownLabelIsAnError) {
  World world;
  EXPECT_FALSE(world.owner->MarkLost("nope").ok());
  EXPECT_FALSE(world.owner->FetchAndDecrypt("nope").ok());
  EXPECT_FALSE(world.owner->ExportIdentity("nope").ok());
}

TEST(OwnerAppTest, OptOutSilencesFinder) {
  World world;
  world.SetUpAndLeave();
  ASSERT_TRUE(world.sim.SetRange("alice", {"tag"}).ok());
  ASSERT_TRUE(world.owner->SetOptOut("tag", true).ok());
  EXPECT_TRUE(world.finder->state().opt_out);
  EXPECT_TRUE(world.owner->record("tag")->opt_out_shadow);
  ASSERT_TRUE(world.sim.SetRange("alice", {}).ok());
  ASSERT_TRUE(world.sim.AdvanceTime(10 * 60'000).ok());
  ASSERT_TRUE(world.sim.SetRange("bob", {"tag"}).ok());
  EXPECT_TRUE(world.reporter->Patrol(GeoLocation{}).empty());
}

}  // namespace
}  // namespace privatefind
