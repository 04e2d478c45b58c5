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

#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "privatefind/errors.h"

namespace privatefind {

namespace {

using Json = nlohmann::ordered_json;

constexpr size_t kMaxDeliveriesPerCall = 1'000'000;

absl::Status Unknown(const std::string& who) {
  return MakeError(ErrorKind::kUnknownEndpoint, who);
}

}  // namespace

std::string_view ChannelName(Channel channel) {
  return channel == Channel::kRadio ? "radio" : "network";
}

std::string LinkAddress::ToString() const {
  std::string out;
  for (size_t i = 0; i < bytes.size(); ++i) {
    if (i > 0) out.push_back(':');
    out += HexEncode(ByteSpan(&bytes[i], 1));
  }
  return out;
}

absl::StatusOr<LinkAddress> LinkAddress::Parse(std::string_view text) {
  if (text.size() != 17) {
    return absl::InvalidArgumentError("bad link address");
  }
  LinkAddress out;
  for (size_t i = 0; i < 6; ++i) {
    if (i > 0 && text[i * 3 - 1] != ':') {
      return absl::InvalidArgumentError("bad link address");
    }
    auto b = HexDecode(text.substr(i * 3, 2));
    if (!b.ok()) return b.status();
    out.bytes[i] = (*b)[0];
  }
  return out;
}

LinkAddress DeriveRandomAddress(const SecretKey& e2e_key, uint32_t epoch) {
  ByteWriter w;
  w.Append(std::string_view("mac")).U32(epoch);
  Digest d = HmacSha256(e2e_key.span(), w.bytes());
  LinkAddress addr;
  std::copy_n(d.begin(), 6, addr.bytes.begin());
  addr.bytes[0] = static_cast<uint8_t>((addr.bytes[0] | 0x02) & ~0x01);
  addr.randomized = true;
  return addr;
}

void Transcript::Append(Envelope envelope) {
  envelopes_.push_back(std::move(envelope));
}

std::string Transcript::ToJsonLines() const {
  std::string out;
  for (const auto& e : envelopes_) {
    Json j;
    j["sim_time"] = e.sim_time_ms;
    j["channel"] = ChannelName(e.channel);
    j["src"] = e.src;
    j["dst"] = e.dst;
    j["payload"] = HexEncode(e.payload);
    j["dropped"] = e.dropped;
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

absl::Status Transcript::WriteJsonLines(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError("cannot write " + path);
  out << ToJsonLines();
  if (!out) return absl::UnavailableError("write failed: " + path);
  return absl::OkStatus();
}

absl::StatusOr<Transcript> Transcript::FromJsonLines(std::string_view text) {
  Transcript transcript;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&](std::string_view why) {
      return MakeError(ErrorKind::kParseError,
                       "transcript line " + std::to_string(line_no) + ": " +
                           std::string(why));
    };
    Json j = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) return fail("not a JSON object");
    try {
      Envelope e;
      e.sim_time_ms = j.at("sim_time").get<int64_t>();
      std::string channel = j.at("channel").get<std::string>();
      if (channel == "radio") {
        e.channel = Channel::kRadio;
      } else if (channel == "network") {
        e.channel = Channel::kNetwork;
      } else {
        return fail("unknown channel");
      }
      e.src = j.at("src").get<std::string>();
      e.dst = j.at("dst").get<std::string>();
      auto payload = HexDecode(j.at("payload").get<std::string>());
      if (!payload.ok()) return fail("payload is not hex");
      e.payload = *std::move(payload);
      e.dropped = j.value("dropped", false);
      transcript.Append(std::move(e));
    } catch (const Json::exception& ex) {
      return fail(ex.what());
    }
  }
  return transcript;
}

absl::StatusOr<Transcript> Transcript::ReadJsonLines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return MakeError(ErrorKind::kParseError, "cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJsonLines(buffer.str());
}

Simulation::Simulation(uint64_t seed)
    : seed_(seed), drop_rng_(seed, "transport/drops") {}

absl::Status Simulation::AddNetworkEndpoint(std::string name, Node* node) {
  if (network_nodes_.contains(name) || finders_.contains(name)) {
    return absl::AlreadyExistsError("endpoint exists: " + name);
  }
  network_nodes_.emplace(std::move(name), node);
  return absl::OkStatus();
}

absl::Status Simulation::AddPhone(std::string name, LinkAddress address,
                                  Node* node) {
  if (network_nodes_.contains(name) || finders_.contains(name)) {
    return absl::AlreadyExistsError("endpoint exists: " + name);
  }
  network_nodes_.emplace(name, node);
  phone_nodes_.emplace(name, node);
  phone_addresses_.emplace(name, address);
  ranges_[name];
  return absl::OkStatus();
}

absl::Status Simulation::AddFinder(std::string name, RadioDevice* device) {
  if (network_nodes_.contains(name) || finders_.contains(name)) {
    return absl::AlreadyExistsError("endpoint exists: " + name);
  }
  connected_[name] = false;
  finders_.emplace(std::move(name), device);
  return absl::OkStatus();
}

absl::Status Simulation::ReplaceNode(const std::string& name, Node* node) {
  auto it = network_nodes_.find(name);
  if (it == network_nodes_.end() || phone_nodes_.contains(name)) {
    return Unknown(name);
  }
  it->second = node;
  return absl::OkStatus();
}

absl::Status Simulation::SetRange(const std::string& phone,
                                  std::set<std::string> finders) {
  if (!phone_nodes_.contains(phone)) return Unknown(phone);
  for (const auto& f : finders) {
    if (!finders_.contains(f)) return Unknown(f);
  }
  ranges_[phone] = std::move(finders);
  UpdateConnections();
  return absl::OkStatus();
}

const std::set<std::string>& Simulation::range(const std::string& phone) const {
  static const std::set<std::string> kEmpty;
  auto it = ranges_.find(phone);
  return it == ranges_.end() ? kEmpty : it->second;
}

bool Simulation::InRange(const std::string& phone,
                         const std::string& finder) const {
  return range(phone).contains(finder);
}

absl::Status Simulation::Bind(const std::string& phone,
                              const std::string& finder) {
  if (!phone_nodes_.contains(phone)) return Unknown(phone);
  if (!finders_.contains(finder)) return Unknown(finder);
  bindings_[finder] = phone;
  UpdateConnections();
  return absl::OkStatus();
}

void Simulation::Unbind(const std::string& finder) {
  bindings_.erase(finder);
  UpdateConnections();
}

bool Simulation::Connected(const std::string& finder) const {
  auto it = connected_.find(finder);
  return it != connected_.end() && it->second;
}

void Simulation::UpdateConnections() {
  for (auto& [name, device] : finders_) {
    auto binding = bindings_.find(name);
    bool now_connected =
        binding != bindings_.end() && InRange(binding->second, name);
    bool& was = connected_[name];
    if (now_connected != was) {
      was = now_connected;
      device->OnConnectionChanged(now_connected, now_ms_);
    }
  }
}

void Simulation::SetDropProbability(Channel channel, double probability) {
  drop_probability_[static_cast<size_t>(channel)] = probability;
}

bool Simulation::IsFinder(const std::string& name) const {
  return finders_.contains(name);
}

std::optional<std::string> Simulation::ResolveRadio(
    const std::string& address) const {
  for (const auto& [name, addr] : phone_addresses_) {
    if (addr.ToString() == address) return name;
  }
  for (const auto& [name, device] : finders_) {
    if (device->link_address().ToString() == address) return name;
  }
  return std::nullopt;
}

std::optional<LinkAddress> Simulation::PhoneAddress(
    const std::string& phone) const {
  auto it = phone_addresses_.find(phone);
  if (it == phone_addresses_.end()) return std::nullopt;
  return it->second;
}

absl::Status Simulation::Send(Envelope envelope) {
  envelope.sim_time_ms = now_ms_;
  envelope.dropped = false;
  std::string target;
  bool reachable = true;
  if (envelope.channel == Channel::kNetwork) {
    if (!network_nodes_.contains(envelope.src)) return Unknown(envelope.src);
    if (!network_nodes_.contains(envelope.dst)) return Unknown(envelope.dst);
    target = envelope.dst;
  } else {
    auto src = ResolveRadio(envelope.src);
    if (!src) return Unknown(envelope.src);
    auto dst = ResolveRadio(envelope.dst);
    if (!dst) return Unknown(envelope.dst);
    if (IsFinder(*src) == IsFinder(*dst)) {
      return absl::InvalidArgumentError("radio links are phone<->finder only");
    }
    const std::string& phone = IsFinder(*src) ? *dst : *src;
    const std::string& finder = IsFinder(*src) ? *src : *dst;
    reachable = InRange(phone, finder);
    target = *dst;
  }
  double p = drop_probability_[static_cast<size_t>(envelope.channel)];
  // The loss model only consumes randomness when enabled, so enabling it on
  // one channel does not perturb runs that never use it.
  if (reachable && p > 0.0 && drop_rng_.NextDouble() < p) reachable = false;
  envelope.dropped = !reachable;
  transcript_.Append(envelope);
  if (reachable) queue_.push_back(Pending{target, std::move(envelope)});
  return absl::OkStatus();
}

void Simulation::Deliver() {
  size_t delivered = 0;
  while (!queue_.empty() && delivered++ < kMaxDeliveriesPerCall) {
    Pending next = std::move(queue_.front());
    queue_.pop_front();
    Node* node = nullptr;
    if (auto it = finders_.find(next.target); it != finders_.end()) {
      node = it->second;
    } else if (auto it = network_nodes_.find(next.target);
               it != network_nodes_.end()) {
      node = it->second;
    }
    if (node != nullptr) node->OnEnvelope(next.envelope, *this);
  }
}

absl::Status Simulation::AdvanceTime(int64_t delta_ms) {
  if (delta_ms < 0) {
    return absl::InvalidArgumentError("cannot move time backwards");
  }
  const int64_t target = now_ms_ + delta_ms;
  while (true) {
    RadioDevice* due = nullptr;
    int64_t due_at = target + 1;
    // std::map iteration gives the name tie-break.
    for (auto& [name, device] : finders_) {
      auto t = device->next_timer_ms();
      if (t && *t < due_at) {
        due_at = std::max(*t, now_ms_);
        due = device;
      }
    }
    if (due == nullptr) break;
    now_ms_ = due_at;
    due->OnTimer(now_ms_);
    Deliver();
  }
  now_ms_ = target;
  return absl::OkStatus();
}

std::vector<LinkAddress> Simulation::Scan(const std::string& observer) const {
  std::vector<LinkAddress> out;
  for (const auto& name : range(observer)) {
    auto it = finders_.find(name);
    if (it != finders_.end() && it->second->advertising()) {
      out.push_back(it->second->link_address());
    }
  }
  return out;
}

}  // namespace privatefind
