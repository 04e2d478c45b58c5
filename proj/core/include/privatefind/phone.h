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

#ifndef PRIVATEFIND_PHONE_H_
#define PRIVATEFIND_PHONE_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "privatefind/network_protocol.h"
#include "privatefind/transport.h"

namespace privatefind {

// Endpoint shared by the owner and reporter apps of one handset. Exchanges
// are synchronous: send, run the loop to quiescence, take the reply.
class Phone final : public Node {
 public:
  Phone(std::string name, LinkAddress address)
      : name_(std::move(name)), address_(address) {}

  const std::string& name() const { return name_; }
  const LinkAddress& address() const { return address_; }

  // Timeout when the finder stays silent or is unreachable.
  absl::StatusOr<Bytes> RadioExchange(Simulation& sim, const LinkAddress& dst,
                                      Bytes frame);
  // NetworkError when no reply arrives.
  absl::StatusOr<Bytes> NetworkExchange(Simulation& sim,
                                        const std::string& server, Bytes frame);
  // Decodes the reply and maps an Error frame onto its protocol error kind.
  absl::StatusOr<net::Message> ServerCall(Simulation& sim,
                                          const std::string& server,
                                          const net::Message& request);

  // Account-less token obtained through the finder challenge, if any.
  const std::optional<net::AccessToken>& access_token() const {
    return access_token_;
  }
  void set_access_token(net::AccessToken token) { access_token_ = token; }

  void OnEnvelope(const Envelope& envelope, Simulation& sim) override;

 private:
  std::optional<Envelope> TakeReply(Channel channel);

  std::string name_;
  LinkAddress address_;
  std::vector<Envelope> inbox_;
  std::optional<net::AccessToken> access_token_;
};

}  // namespace privatefind

#endif  // PRIVATEFIND_PHONE_H_
