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

#include "privatefind/transport.h"

#include <memory>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "privatefind/crypto.h"
#include "privatefind/errors.h"
#include "privatefind/finder.h"
#include "privatefind/random.h"

namespace privatefind {
namespace {

class RecordingNode : public Node {
 public:
  void OnEnvelope(const Envelope& envelope, Simulation&) override {
    received.push_back(envelope);
  }
  std::vector<Envelope> received;
};

LinkAddress Address(uint8_t last) {
  LinkAddress a;
  a.bytes = {0x02, 0, 0, 0, 0, last};
  return a;
}

std::unique_ptr<Finder> MakeFinder(uint64_t seed, FinderConfig config = {}) {
  DeterministicRandom factory(seed, "factory");
  return std::make_unique<Finder>(
      Finder::Manufacture(factory), config,
      std::make_unique<DeterministicRandom>(seed, "finder"));
}

TEST(LinkAddressTest, ToStringAndParse) {
  LinkAddress a;
  a.bytes = {0xaa, 0x0b, 0x00, 0x01, 0xfe, 0x10};
  EXPECT_EQ(a.ToString(), "aa:0b:00:01:fe:10");
  auto parsed = LinkAddress::Parse("aa:0b:00:01:fe:10");
  ASSERT_TRUE(parsed.ok());
  EXPECT_EQ(parsed->bytes, a.bytes);
  EXPECT_FALSE(LinkAddress::Parse("aa:0b:00:01:fe").ok());
  EXPECT_FALSE(LinkAddress::Parse("aa:0b:00:01:fe:1g").ok());
}

TEST(DeriveRandomAddressTest, PinnedAndFlagged) {
  LinkAddress a = DeriveRandomAddress(SecretKey::Filled(0x01), 3);
  EXPECT_EQ(a.ToString(), "8a:18:6c:d6:2e:af");
  for (uint32_t epoch = 0; epoch < 50; ++epoch) {
    LinkAddress r = DeriveRandomAddress(SecretKey::Filled(0x07), epoch);
    EXPECT_EQ(r.bytes[0] & 0x02, 0x02);
    EXPECT_EQ(r.bytes[0] & 0x01, 0x00);
  }
  EXPECT_NE(DeriveRandomAddress(SecretKey::Filled(1), 0).bytes,
            DeriveRandomAddress(SecretKey::Filled(1), 1).bytes);
}

TEST(SimulationTest, SendThenDeliverInvokesReceiverOnce) {
  Simulation sim(1);
  RecordingNode a, b;
  ASSERT_TRUE(sim.AddNetworkEndpoint("a", &a).ok());
  ASSERT_TRUE(sim.AddNetworkEndpoint("b", &b).ok());
  Bytes payload{1, 2, 3};
  ASSERT_TRUE(sim.Send(Envelope{.src = "a", .dst = "b", .payload = payload})
                  .ok());
  sim.Deliver();
  ASSERT_EQ(b.received.size(), 1u);
  EXPECT_EQ(b.received[0].payload, payload);
  EXPECT_TRUE(a.received.empty());
  sim.Deliver();
  EXPECT_EQ(b.received.size(), 1u);
}

TEST(SimulationTest, FifoOrder) {
  Simulation sim(1);
  RecordingNode a, b;
  ASSERT_TRUE(sim.AddNetworkEndpoint("a", &a).ok());
  ASSERT_TRUE(sim.AddNetworkEndpoint("b", &b).ok());
  ASSERT_TRUE(sim.Send(Envelope{.src = "a", .dst = "b", .payload = {1}}).ok());
  ASSERT_TRUE(sim.Send(Envelope{.src = "a", .dst = "b", .payload = {2}}).ok());
  sim.Deliver();
  ASSERT_EQ(b.received.size(), 2u);
  EXPECT_EQ(b.received[0].payload, Bytes{1});
  EXPECT_EQ(b.received[1].payload, Bytes{2});
}

TEST(SimulationTest, DropProbabilityOneStillRecordsSend) {
  Simulation sim(1);
  RecordingNode a, b;
  ASSERT_TRUE(sim.AddNetworkEndpoint("a", &a).ok());
  ASSERT_TRUE(sim.AddNetworkEndpoint("b", &b).ok());
  sim.SetDropProbability(Channel::kNetwork, 1.0);
  ASSERT_TRUE(sim.Send(Envelope{.src = "a", .dst = "b", .payload = {7}}).ok());
  sim.Deliver();
  EXPECT_TRUE(b.received.empty());
  ASSERT_EQ(sim.transcript().size(), 1u);
  EXPECT_TRUE(sim.transcript().envelopes()[0].dropped);
  EXPECT_EQ(sim.transcript().envelopes()[0].payload, Bytes{7});
}

TEST(SimulationTest, UnknownEndpointsAreErrors) {
  Simulation sim(1);
  RecordingNode a;
  ASSERT_TRUE(sim.AddNetworkEndpoint("a", &a).ok());
  EXPECT_EQ(KindOf(sim.Send(Envelope{.src = "a", .dst = "nobody"})),
            ErrorKind::kUnknownEndpoint);
  EXPECT_EQ(sim.transcript().size(), 0u);
  EXPECT_FALSE(sim.AddNetworkEndpoint("a", &a).ok());
}

TEST(SimulationTest, AdvanceZeroChangesNothing) {
  Simulation sim(1);
  auto finder = MakeFinder(1);
  ASSERT_TRUE(sim.AddFinder("f", finder.get()).ok());
  const FinderState before = finder->state();
  ASSERT_TRUE(sim.AdvanceTime(0).ok());
  EXPECT_EQ(sim.now_ms(), 0);
  EXPECT_EQ(finder->state().epoch_counter, before.epoch_counter);
  EXPECT_EQ(finder->state().id_rand, before.id_rand);
  EXPECT_FALSE(sim.AdvanceTime(-1).ok());
}

TEST(SimulationTest, RatchetStepsFollowWholeEpochs) {
  Simulation sim(1);
  RecordingNode phone;
  auto finder = MakeFinder(2);
  ASSERT_TRUE(sim.AddFinder("f", finder.get()).ok());
  finder->PressButtonHold(0);
  const auto key = SecretKey::Filled(0x31);
  ASSERT_TRUE(finder->HandleSetupLocal(radio::Setup{0, key}, 0).has_value());
  const Identifier id_init = finder->state().id_init;

  ASSERT_TRUE(sim.AdvanceTime(kDefaultEpochMs + 1).ok());
  EXPECT_EQ(finder->state().epoch_counter, 1u);
  EXPECT_EQ(finder->state().id_rand, RatchetAt(key, id_init, 1));

  Simulation sim2(1);
  auto other = MakeFinder(3);
  ASSERT_TRUE(sim2.AddFinder("g", other.get()).ok());
  other->PressButtonHold(0);
  ASSERT_TRUE(other->HandleSetupLocal(radio::Setup{0, key}, 0).has_value());
  ASSERT_TRUE(sim2.AdvanceTime(kDefaultEpochMs * 5 / 2).ok());
  EXPECT_EQ(other->state().epoch_counter, 2u);
  EXPECT_EQ(other->state().id_rand,
            RatchetAt(key, other->state().id_init, 2));
}

TEST(SimulationTest, ScanShowsOnlyDisconnectedFindersInRange) {
  Simulation sim(1);
  RecordingNode alice, bob;
  auto finder = MakeFinder(4);
  ASSERT_TRUE(sim.AddPhone("alice", Address(1), &alice).ok());
  ASSERT_TRUE(sim.AddPhone("bob", Address(2), &bob).ok());
  ASSERT_TRUE(sim.AddFinder("f", finder.get()).ok());

  EXPECT_TRUE(sim.Scan("bob").empty());  // out of range
  ASSERT_TRUE(sim.SetRange("bob", {"f"}).ok());
  ASSERT_EQ(sim.Scan("bob").size(), 1u);
  EXPECT_EQ(sim.Scan("bob")[0], finder->link_address());

  ASSERT_TRUE(sim.SetRange("alice", {"f"}).ok());
  ASSERT_TRUE(sim.Bind("alice", "f").ok());
  EXPECT_TRUE(sim.Connected("f"));
  EXPECT_TRUE(sim.Scan("bob").empty());  // connected finders hide

  ASSERT_TRUE(sim.SetRange("alice", {}).ok());
  EXPECT_FALSE(sim.Connected("f"));
  EXPECT_EQ(sim.Scan("bob").size(), 1u);
}

TEST(SimulationTest, ScanPrivacyUnderRandomMovement) {
  Simulation sim(11);
  RecordingNode alice, bob;
  std::vector<std::unique_ptr<Finder>> finders;
  ASSERT_TRUE(sim.AddPhone("alice", Address(1), &alice).ok());
  ASSERT_TRUE(sim.AddPhone("bob", Address(2), &bob).ok());
  const std::vector<std::string> names = {"f0", "f1", "f2"};
  for (size_t i = 0; i < names.size(); ++i) {
    finders.push_back(MakeFinder(100 + i));
    ASSERT_TRUE(sim.AddFinder(names[i], finders.back().get()).ok());
    ASSERT_TRUE(sim.Bind("alice", names[i]).ok());
  }
  DeterministicRandom rng(11, "moves");
  for (int step = 0; step < 300; ++step) {
    std::set<std::string> alice_range, bob_range;
    for (const auto& n : names) {
      if (rng.NextBelow(2)) alice_range.insert(n);
      if (rng.NextBelow(2)) bob_range.insert(n);
    }
    ASSERT_TRUE(sim.SetRange("alice", alice_range).ok());
    ASSERT_TRUE(sim.SetRange("bob", bob_range).ok());
    ASSERT_TRUE(sim.AdvanceTime(rng.NextBelow(120000)).ok());
    for (size_t i = 0; i < names.size(); ++i) {
      const bool visible = [&] {
        for (const auto& a : sim.Scan("bob")) {
          if (a == finders[i]->link_address()) return true;
        }
        return false;
      }();
      if (sim.Connected(names[i])) EXPECT_FALSE(visible);
      EXPECT_EQ(sim.Connected(names[i]), alice_range.contains(names[i]));
    }
  }
}

TEST(SimulationTest, RadioOutOfRangeIsRecordedAsDropped) {
  Simulation sim(1);
  RecordingNode bob;
  auto finder = MakeFinder(5);
  ASSERT_TRUE(sim.AddPhone("bob", Address(2), &bob).ok());
  ASSERT_TRUE(sim.AddFinder("f", finder.get()).ok());
  ASSERT_TRUE(sim.Send(Envelope{.src = Address(2).ToString(),
                                .dst = finder->link_address().ToString(),
                                .channel = Channel::kRadio,
                                .payload = {0x08}})
                  .ok());
  sim.Deliver();
  ASSERT_EQ(sim.transcript().size(), 1u);
  EXPECT_TRUE(sim.transcript().envelopes()[0].dropped);
  EXPECT_TRUE(bob.received.empty());
}

TEST(TranscriptTest, JsonLinesRoundTrip) {
  Transcript t;
  t.Append(Envelope{.src = "a",
                    .dst = "b",
                    .channel = Channel::kNetwork,
                    .payload = {0xde, 0xad},
                    .sim_time_ms = 5});
  t.Append(Envelope{.src = "02:00:00:00:00:01",
                    .dst = "c2:00:00:00:00:02",
                    .channel = Channel::kRadio,
                    .payload = {},
                    .sim_time_ms = 900000,
                    .dropped = true});
  const std::string text = t.ToJsonLines();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            R"({"sim_time":5,"channel":"network","src":"a","dst":"b",)"
            R"("payload":"dead","dropped":false})");
  auto parsed = Transcript::FromJsonLines(text);
  ASSERT_TRUE(parsed.ok());
  EXPECT_EQ(parsed->envelopes(), t.envelopes());
  EXPECT_FALSE(Transcript::FromJsonLines("{\"sim_time\":1}\n").ok());
  EXPECT_FALSE(Transcript::FromJsonLines("not json\n").ok());
}

TEST(SimulationTest, IdenticalDriversGiveIdenticalTranscripts) {
  auto run = [] {
    Simulation sim(99);
    RecordingNode a, b;
    EXPECT_TRUE(sim.AddNetworkEndpoint("a", &a).ok());
    EXPECT_TRUE(sim.AddNetworkEndpoint("b", &b).ok());
    sim.SetDropProbability(Channel::kNetwork, 0.5);
    for (uint8_t i = 0; i < 50; ++i) {
      EXPECT_TRUE(
          sim.Send(Envelope{.src = "a", .dst = "b", .payload = {i}}).ok());
      EXPECT_TRUE(sim.AdvanceTime(1000).ok());
    }
    sim.Deliver();
    return sim.transcript().ToJsonLines();
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace privatefind
