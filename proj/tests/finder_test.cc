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

#include "privatefind/finder.h"

#include <memory>

#include "gtest/gtest.h"
#include "privatefind/crypto.h"
#include "privatefind/random.h"
#include "test_util.h"

namespace privatefind {
namespace {

constexpr int64_t kMinute = 60'000;

class FinderTest : public ::testing::Test {
 protected:
  FinderTest() : finder_(MakeFinder({})) {}

  static std::unique_ptr<Finder> MakeFinder(FinderConfig config) {
    DeterministicRandom factory(7, "factory");
    return std::make_unique<Finder>(
        Finder::Manufacture(factory), config,
        std::make_unique<DeterministicRandom>(7, "finder"));
  }

  // Completes a local setup at time 0.
  void SetUpAt(int64_t now_ms) {
    finder_->PressButtonHold(now_ms);
    ASSERT_TRUE(
        finder_->HandleSetupLocal(radio::Setup{0, key_}, now_ms).has_value());
  }

  radio::AreYouLost Ask() const {
    return radio::AreYouLost{GeoLocation{.lat_e7 = 525200066,
                                         .lon_e7 = 134049540}};
  }

  const SecretKey key_ = SecretKey::Filled(0x42);
  std::unique_ptr<Finder> finder_;
};

TEST_F(FinderTest, ManufactureSetsStaticRandomAddress) {
  DeterministicRandom factory(1, "factory");
  for (int i = 0; i < 20; ++i) {
    ProvisioningRecord record = Finder::Manufacture(factory);
    EXPECT_EQ(record.address.bytes[0] & 0xC0, 0xC0);
    EXPECT_TRUE(record.mf_key.has_value());
  }
  EXPECT_FALSE(Finder::Manufacture(factory, false).mf_key.has_value());
}

TEST_F(FinderTest, SetupRequiresButton) {
  EXPECT_FALSE(finder_->HandleSetupLocal(radio::Setup{0, key_}, 0));
  EXPECT_FALSE(finder_->state().e2e_key.has_value());
  EXPECT_FALSE(finder_->HandleIdentityRead(0));
}

TEST_F(FinderTest, SetupWindowClosesAfterTimeout) {
  finder_->PressButtonHold(0);
  EXPECT_FALSE(
      finder_->HandleSetupLocal(radio::Setup{0, key_}, 61'000).has_value());
  finder_->PressButtonHold(100'000);
  EXPECT_TRUE(
      finder_->HandleSetupLocal(radio::Setup{0, key_}, 159'999).has_value());
}

TEST_F(FinderTest, SetupInitialisesRatchet) {
  const Identifier id_init = finder_->state().id_init;
  SetUpAt(0);
  const FinderState& s = finder_->state();
  EXPECT_EQ(s.id_init, id_init);
  EXPECT_EQ(s.epoch_counter, 0u);
  EXPECT_EQ(s.id_rand, RatchetFirst(key_, id_init));
  EXPECT_FALSE(s.setup_mode);
  // A second setup needs a fresh press.
  EXPECT_FALSE(finder_->HandleSetupLocal(radio::Setup{0, key_}, 1));
}

TEST_F(FinderTest, ResetFlagReplacesIdInit) {
  const Identifier before = finder_->state().id_init;
  finder_->PressButtonHold(0);
  auto ok = finder_->HandleSetupLocal(
      radio::Setup{radio::kFlagResetIdInit, key_}, 0);
  ASSERT_TRUE(ok.has_value());
  EXPECT_NE(ok->id_init, before);
  EXPECT_EQ(finder_->state().id_init, ok->id_init);
}

TEST_F(FinderTest, EpochTicksAdvanceRatchet) {
  SetUpAt(0);
  const Identifier id_init = finder_->state().id_init;
  finder_->OnTimer(kDefaultEpochMs - 1);
  EXPECT_EQ(finder_->state().epoch_counter, 0u);
  finder_->OnTimer(3 * kDefaultEpochMs);
  EXPECT_EQ(finder_->state().epoch_counter, 3u);
  EXPECT_EQ(finder_->state().id_rand, RatchetAt(key_, id_init, 3));
  EXPECT_EQ(finder_->next_timer_ms(), 4 * kDefaultEpochMs);
}

TEST_F(FinderTest, AreYouLostSilentBeforeSetup) {
  EXPECT_FALSE(finder_->HandleAreYouLost(Ask(), 10 * kMinute));
}

TEST_F(FinderTest, AreYouLostWaitsForThreshold) {
  SetUpAt(0);
  EXPECT_FALSE(finder_->HandleAreYouLost(Ask(), 5 * kMinute - 1));
  EXPECT_TRUE(finder_->HandleAreYouLost(Ask(), 5 * kMinute));
}

TEST_F(FinderTest, AreYouLostSilentWhileConnected) {
  SetUpAt(0);
  finder_->OnConnectionChanged(true, 0);
  EXPECT_FALSE(finder_->HandleAreYouLost(Ask(), 60 * kMinute));
  finder_->OnConnectionChanged(false, 60 * kMinute);
  EXPECT_FALSE(finder_->HandleAreYouLost(Ask(), 64 * kMinute));
  EXPECT_TRUE(finder_->HandleAreYouLost(Ask(), 65 * kMinute));
}

TEST_F(FinderTest, ReportsAreRateLimitedAndCounted) {
  SetUpAt(0);
  auto first = finder_->HandleAreYouLost(Ask(), 10 * kMinute);
  ASSERT_TRUE(first.has_value());
  EXPECT_FALSE(finder_->HandleAreYouLost(Ask(), 10 * kMinute + 59'999));
  auto second = finder_->HandleAreYouLost(Ask(), 11 * kMinute);
  ASSERT_TRUE(second.has_value());
  EXPECT_EQ(finder_->state().report_counter, 2u);

  auto plaintext = Open(key_, second->e2e_message);
  ASSERT_TRUE(plaintext.ok());
  EXPECT_EQ(*plaintext, radio::EncodeReportPlaintext(Ask().geo, 2));
  EXPECT_EQ(second->e2e_message.wire_size(), radio::kE2eMessageSize);
  EXPECT_EQ(second->id_rand, finder_->state().id_rand);
}

TEST_F(FinderTest, OptOutNeedsValidTagForCurrentEpoch) {
  SetUpAt(0);
  finder_->OnTimer(3 * kDefaultEpochMs);
  radio::SetOptOut stale{true, 2, radio::OptOutTag(key_, true, 2)};
  EXPECT_FALSE(finder_->HandleSetOptOut(stale));
  radio::SetOptOut forged{true, 3, radio::OptOutTag(SecretKey::Filled(1),
                                                     true, 3)};
  EXPECT_FALSE(finder_->HandleSetOptOut(forged));
  EXPECT_FALSE(finder_->state().opt_out);

  radio::SetOptOut good{true, 3, radio::OptOutTag(key_, true, 3)};
  EXPECT_TRUE(finder_->HandleSetOptOut(good));
  EXPECT_TRUE(finder_->state().opt_out);
  EXPECT_FALSE(finder_->HandleAreYouLost(Ask(), 4 * kDefaultEpochMs - 1));

  radio::SetOptOut off{false, 3, radio::OptOutTag(key_, false, 3)};
  EXPECT_TRUE(finder_->HandleSetOptOut(off));
  EXPECT_TRUE(finder_->HandleAreYouLost(Ask(), 4 * kDefaultEpochMs - 1));
}

TEST_F(FinderTest, VerifiedSetupUnwrapsSessionKey) {
  const SecretKey mf_key = *finder_->state().mf_key;
  const SecretKey setup_key = SecretKey::Filled(0x55);
  DeterministicRandom rng(3, "server");
  finder_->PressButtonHold(0);
  ASSERT_TRUE(finder_->HandleSetupEncBegin(
      radio::SetupEncBegin{Seal(mf_key, setup_key.span(), rng)}, 0));
  const Identifier id_init = finder_->state().id_init;
  // The reset flag has no effect in the verified flow.
  radio::SetupSealed sealed{
      Seal(setup_key,
           radio::EncodeSetupBody(radio::Setup{radio::kFlagResetIdInit, key_}),
           rng)};
  auto ok = finder_->HandleSetupSealed(sealed, 1000);
  ASSERT_TRUE(ok.has_value());
  auto opened = Open(setup_key, ok->body);
  ASSERT_TRUE(opened.ok());
  EXPECT_EQ(*opened, testing::ToVector(id_init.span()));
  EXPECT_EQ(finder_->state().e2e_key, key_);
  EXPECT_EQ(finder_->state().id_init, id_init);
}

TEST_F(FinderTest, VerifiedSetupRejectsWrongManufacturerKey) {
  DeterministicRandom rng(3, "server");
  finder_->PressButtonHold(0);
  EXPECT_FALSE(finder_->HandleSetupEncBegin(
      radio::SetupEncBegin{Seal(SecretKey::Filled(9),
                                SecretKey::Filled(0x55).span(), rng)},
      0));
  radio::SetupSealed sealed{
      Seal(SecretKey::Filled(0x55),
           radio::EncodeSetupBody(radio::Setup{0, key_}), rng)};
  EXPECT_FALSE(finder_->HandleSetupSealed(sealed, 0));
  EXPECT_FALSE(finder_->state().e2e_key.has_value());
}

TEST_F(FinderTest, TokenChallengeNeedsLabel) {
  SetUpAt(0);
  const SecretKey mf_key = *finder_->state().mf_key;
  DeterministicRandom rng(4, "server");
  Bytes plaintext(radio::kTokenChallengePlaintextSize, 0xAB);
  EXPECT_FALSE(finder_->HandleTokenChallenge(
      radio::TokenChallengeRelay{Seal(mf_key, plaintext, rng)}));
  const std::string label = "pf-token";
  std::copy(label.begin(), label.end(), plaintext.begin());
  auto answer = finder_->HandleTokenChallenge(
      radio::TokenChallengeRelay{Seal(mf_key, plaintext, rng)});
  ASSERT_TRUE(answer.has_value());
  EXPECT_EQ(answer->nonce[0], 0xAB);
}

TEST_F(FinderTest, MacRandomizationFollowsEpoch) {
  FinderConfig config;
  config.mac_randomization = true;
  finder_ = MakeFinder(config);
  const LinkAddress factory_address = finder_->link_address();
  SetUpAt(0);
  EXPECT_EQ(finder_->link_address(), DeriveRandomAddress(key_, 0));
  EXPECT_NE(finder_->link_address(), factory_address);
  finder_->OnTimer(kDefaultEpochMs);
  EXPECT_EQ(finder_->link_address(), DeriveRandomAddress(key_, 1));
}

TEST_F(FinderTest, ClockSkewShiftsEpochBoundary) {
  SetUpAt(0);
  finder_->ApplyClockSkew(2 * kDefaultEpochMs, 0);
  EXPECT_EQ(finder_->state().epoch_counter, 2u);
}

TEST_F(FinderTest, MalformedFramesAreIgnored) {
  SetUpAt(0);
  EXPECT_FALSE(finder_->HandleFrame(Bytes{0x04, 0x01}, 10 * kMinute));
  EXPECT_FALSE(finder_->HandleFrame(Bytes{0x7f}, 10 * kMinute));
  EXPECT_FALSE(finder_->HandleFrame(Bytes{}, 10 * kMinute));
  EXPECT_TRUE(finder_->HandleFrame(radio::Encode(Ask()), 10 * kMinute));
}

}  // namespace
}  // namespace privatefind
