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

#include "privatefind/reporter.h"

#include <vector>

#include "gtest/gtest.h"
#include "privatefind/errors.h"
#include "test_util.h"
#include "world.h"

namespace privatefind {
namespace {

using ::privatefind::testing::World;

constexpr int64_t kMinute = 60'000;
const GeoLocation kHere{.lat_e7 = 525200066, .lon_e7 = 134049540};

TEST(ReporterTest, NoFindersInRangeYieldsNothing) {
  World world;
  world.SetUpAndLeave();
  ASSERT_TRUE(world.sim.AdvanceTime(10 * kMinute).ok());
  EXPECT_TRUE(world.reporter->Patrol(kHere).empty());
  EXPECT_EQ(world.sim.transcript().size(), 2u);  // setup exchange only
}

TEST(ReporterTest, PatrolCollectsCurrentPseudonym) {
  World world;
  world.SetUpAndLeave();
  ASSERT_TRUE(world.sim.AdvanceTime(2 * kDefaultEpochMs + kMinute).ok());
  ASSERT_TRUE(world.sim.SetRange("bob", {"tag"}).ok());
  auto reports = world.reporter->Patrol(kHere);
  ASSERT_EQ(reports.size(), 1u);
  const OwnerRecord* record = world.owner->record("tag");
  EXPECT_EQ(reports[0].id_rand,
            RatchetAt(record->e2e_key, record->id_init, 2));
  EXPECT_EQ(reports[0].e2e_message.wire_size(), radio::kE2eMessageSize);
}

TEST(ReporterTest, FinderNearItsOwnerStaysSilent) {
  World world;
  world.SetUpAndLeave();
  ASSERT_TRUE(world.sim.AdvanceTime(4 * kMinute).ok());
  ASSERT_TRUE(world.sim.SetRange("bob", {"tag"}).ok());
  EXPECT_TRUE(world.reporter->Patrol(kHere).empty());
}

TEST(ReporterTest, OwnFindersAreSkipped) {
  World world;
  world.SetUpAndLeave();
  ASSERT_TRUE(world.sim.AdvanceTime(10 * kMinute).ok());
  ASSERT_TRUE(world.sim.SetRange("bob", {"tag"}).ok());
  const LinkAddress address = world.finder->link_address();
  world.reporter->set_own_finders(
      [address] { return std::vector<LinkAddress>{address}; });
  EXPECT_TRUE(world.reporter->Patrol(kHere).empty());
}

TEST(ReporterTest, EmptySubmitSendsNothing) {
  World world;
  const size_t before = world.sim.transcript().size();
  EXPECT_TRUE(world.reporter->Submit({}).ok());
  EXPECT_EQ(world.sim.transcript().size(), before);
}

TEST(ReporterTest, EndToEndOwnerDecryptsLocation) {
  World world;
  world.SetUpAndLeave();
  ASSERT_TRUE(world.sim.AdvanceTime(10 * kMinute).ok());
  ASSERT_TRUE(world.sim.SetRange("bob", {"tag"}).ok());
  auto reports = world.reporter->Patrol(kHere);
  ASSERT_EQ(reports.size(), 1u);
  ASSERT_TRUE(world.reporter->Submit(reports).ok());
  ASSERT_EQ(world.server->reports().size(), 1u);

  auto fetched = world.owner->FetchAndDecrypt("tag");
  ASSERT_TRUE(fetched.ok()) << fetched.status();
  ASSERT_EQ(fetched->size(), 1u);
  EXPECT_EQ((*fetched)[0].geo, kHere);
  EXPECT_EQ((*fetched)[0].counter, 1u);
  EXPECT_TRUE((*fetched)[0].anonymous);
  // Resubmitting the same report is not accepted twice by the owner.
  ASSERT_TRUE(world.reporter->Submit(reports).ok());
  fetched = world.owner->FetchAndDecrypt("tag");
  ASSERT_TRUE(fetched.ok());
  EXPECT_TRUE(fetched->empty());
}

TEST(ReporterTest, LostPrefilterKeepsOnlyListedIds) {
  World world;
  world.SetUpAndLeave();
  ReporterApp filtered(world.bob, world.sim,
                       ReporterOptions{.lost_prefilter = true});
  ASSERT_TRUE(world.sim.AdvanceTime(10 * kMinute).ok());
  ASSERT_TRUE(world.sim.SetRange("bob", {"tag"}).ok());
  EXPECT_TRUE(filtered.Patrol(kHere).empty());
  ASSERT_TRUE(world.owner->MarkLost("tag").ok());
  ASSERT_TRUE(world.sim.AdvanceTime(2 * kMinute).ok());
  EXPECT_EQ(filtered.Patrol(kHere).size(), 1u);
}

TEST(ReporterTest, SubmitWithoutTokenRejectedWhenRequired) {
  World world(ServerConfig{.token_policy = TokenPolicy::kIngest});
  world.SetUpAndLeave();
  ASSERT_TRUE(world.sim.AdvanceTime(10 * kMinute).ok());
  ASSERT_TRUE(world.sim.SetRange("bob", {"tag"}).ok());
  auto reports = world.reporter->Patrol(kHere);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(KindOf(world.reporter->Submit(reports)),
            ErrorKind::kTokenRequired);
  EXPECT_TRUE(world.server->reports().empty());
}

}  // namespace
}  // namespace privatefind
