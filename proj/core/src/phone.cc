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

#include "privatefind/phone.h"

#include <utility>

#include "privatefind/errors.h"

namespace privatefind {

void Phone::OnEnvelope(const Envelope& envelope, Simulation& /*sim*/) {
  inbox_.push_back(envelope);
}

std::optional<Envelope> Phone::TakeReply(Channel channel) {
  for (auto it = inbox_.begin(); it != inbox_.end(); ++it) {
    if (it->channel == channel) {
      Envelope out = std::move(*it);
      inbox_.erase(it);
      return out;
    }
  }
  return std::nullopt;
}

absl::StatusOr<Bytes> Phone::RadioExchange(Simulation& sim,
                                           const LinkAddress& dst,
                                           Bytes frame) {
  inbox_.clear();
  absl::Status sent = sim.Send(Envelope{.src = address_.ToString(),
                                        .dst = dst.ToString(),
                                        .channel = Channel::kRadio,
                                        .payload = std::move(frame)});
  if (!sent.ok()) return Timeout("no device at " + dst.ToString());
  sim.Deliver();
  auto reply = TakeReply(Channel::kRadio);
  if (!reply) return Timeout("no reply from " + dst.ToString());
  return std::move(reply->payload);
}

absl::StatusOr<Bytes> Phone::NetworkExchange(Simulation& sim,
                                             const std::string& server,
                                             Bytes frame) {
  inbox_.clear();
  absl::Status sent = sim.Send(Envelope{.src = name_,
                                        .dst = server,
                                        .channel = Channel::kNetwork,
                                        .payload = std::move(frame)});
  if (!sent.ok()) return sent;
  sim.Deliver();
  auto reply = TakeReply(Channel::kNetwork);
  if (!reply) return MakeError(ErrorKind::kNetworkError, "no reply");
  return std::move(reply->payload);
}

absl::StatusOr<net::Message> Phone::ServerCall(Simulation& sim,
                                               const std::string& server,
                                               const net::Message& request) {
  auto raw = NetworkExchange(sim, server, net::Encode(request));
  if (!raw.ok()) return raw.status();
  auto reply = net::Decode(*raw);
  if (!reply.ok()) {
    return MakeError(ErrorKind::kNetworkError, std::string(reply.status().message()));
  }
  if (const auto* error = std::get_if<net::Error>(&*reply)) {
    return MakeError(net::KindForErrorCode(error->code), "server refused");
  }
  return reply;
}

}  // namespace privatefind
