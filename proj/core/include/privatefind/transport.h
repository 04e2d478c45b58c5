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

// Deterministic in-process stand-in for the BLE link between phones and
// finders and for the network path between phones and the server.
//
// Everything runs on one logical loop owned by Simulation: sends are queued
// and dispatched FIFO by Deliver(), timers fire from AdvanceTime() in
// (time, device name) order, and every send is appended to a Transcript that
// can be exported as JSON lines. Radio reachability is a per-phone set of
// finder names; there is no RF model.

#ifndef PRIVATEFIND_TRANSPORT_H_
#define PRIVATEFIND_TRANSPORT_H_

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privatefind/bytes.h"
#include "privatefind/crypto.h"
#include "privatefind/random.h"

namespace privatefind {

inline constexpr int64_t kDefaultEpochMs = 15 * 60 * 1000;

enum class Channel { kRadio, kNetwork };

std::string_view ChannelName(Channel channel);

struct LinkAddress {
  std::array<uint8_t, 6> bytes{};
  bool randomized = false;

  // "02:1a:2b:3c:4d:5e".
  std::string ToString() const;
  static absl::StatusOr<LinkAddress> Parse(std::string_view text);

  friend bool operator==(const LinkAddress&, const LinkAddress&) = default;
};

// First six bytes of HMAC(e2e_key, "mac" || epoch (u32 BE)) with the
// locally-administered bit set and the multicast bit cleared.
LinkAddress DeriveRandomAddress(const SecretKey& e2e_key, uint32_t epoch);

struct Envelope {
  // Endpoint name on the network channel, link address on the radio channel.
  std::string src;
  std::string dst;
  Channel channel = Channel::kNetwork;
  Bytes payload;
  int64_t sim_time_ms = 0;
  // Sent but never delivered (out of range or dropped by the loss model).
  bool dropped = false;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

class Transcript {
 public:
  void Append(Envelope envelope);
  const std::vector<Envelope>& envelopes() const { return envelopes_; }
  size_t size() const { return envelopes_.size(); }

  // One JSON object per line: sim_time, channel, src, dst, payload (hex),
  // dropped.
  std::string ToJsonLines() const;
  absl::Status WriteJsonLines(const std::string& path) const;
  static absl::StatusOr<Transcript> FromJsonLines(std::string_view text);
  static absl::StatusOr<Transcript> ReadJsonLines(const std::string& path);

 private:
  std::vector<Envelope> envelopes_;
};

class Simulation;

class Node {
 public:
  virtual ~Node() = default;
  virtual void OnEnvelope(const Envelope& envelope, Simulation& sim) = 0;
};

// A finder as seen by the radio layer.
class RadioDevice : public Node {
 public:
  virtual LinkAddress link_address() const = 0;
  // Whether the device shows up in scans (i.e. it is not connected to its
  // owner).
  virtual bool advertising() const = 0;
  virtual std::optional<int64_t> next_timer_ms() const { return std::nullopt; }
  // Fires every timer due at `now_ms`.
  virtual void OnTimer(int64_t /*now_ms*/) {}
  virtual void OnConnectionChanged(bool /*connected*/, int64_t /*now_ms*/) {}
};

class Simulation {
 public:
  explicit Simulation(uint64_t seed);

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  int64_t now_ms() const { return now_ms_; }
  uint64_t seed() const { return seed_; }

  // Network-only endpoint, addressed by `name` (the server).
  absl::Status AddNetworkEndpoint(std::string name, Node* node);
  // Phone: reachable by `name` on the network and by `address` on radio.
  absl::Status AddPhone(std::string name, LinkAddress address, Node* node);
  // Finder: radio only, addressed by its current link_address().
  absl::Status AddFinder(std::string name, RadioDevice* device);
  // Replaces the node registered under `name`, e.g. after a server restart.
  absl::Status ReplaceNode(const std::string& name, Node* node);

  // Sets which finders `phone` can reach. Out-of-range radio frames are
  // recorded as dropped.
  absl::Status SetRange(const std::string& phone,
                        std::set<std::string> finders);
  const std::set<std::string>& range(const std::string& phone) const;
  bool InRange(const std::string& phone, const std::string& finder) const;

  // Records that `phone` maintains a connection to `finder` whenever both
  // are in range. A finder has at most one owner connection.
  absl::Status Bind(const std::string& phone, const std::string& finder);
  void Unbind(const std::string& finder);
  bool Connected(const std::string& finder) const;

  void SetDropProbability(Channel channel, double probability);

  // Stamps the current time, appends to the transcript and queues for
  // delivery. UnknownEndpoint if the source or destination does not
  // resolve.
  absl::Status Send(Envelope envelope);
  // Dispatches queued envelopes in FIFO order, including any sent by
  // handlers, until the queue is empty.
  void Deliver();

  // Moves the clock forward, firing due device timers in (time, name)
  // order. delta_ms must be non-negative.
  absl::Status AdvanceTime(int64_t delta_ms);

  // Addresses of advertising finders within `observer`'s range, ordered by
  // finder name.
  std::vector<LinkAddress> Scan(const std::string& observer) const;

  // Name of the endpoint currently owning `address` on radio, if any.
  std::optional<std::string> ResolveRadio(const std::string& address) const;
  std::optional<LinkAddress> PhoneAddress(const std::string& phone) const;

  const Transcript& transcript() const { return transcript_; }

 private:
  struct Pending {
    std::string target;
    Envelope envelope;
  };

  void UpdateConnections();
  bool IsFinder(const std::string& name) const;

  uint64_t seed_;
  int64_t now_ms_ = 0;
  DeterministicRandom drop_rng_;
  std::array<double, 2> drop_probability_{0.0, 0.0};

  std::map<std::string, Node*> network_nodes_;
  std::map<std::string, LinkAddress> phone_addresses_;
  std::map<std::string, Node*> phone_nodes_;
  std::map<std::string, RadioDevice*> finders_;
  std::map<std::string, std::set<std::string>> ranges_;
  // finder -> owning phone
  std::map<std::string, std::string> bindings_;
  std::map<std::string, bool> connected_;

  std::deque<Pending> queue_;
  Transcript transcript_;
};

}  // namespace privatefind

#endif  // PRIVATEFIND_TRANSPORT_H_
