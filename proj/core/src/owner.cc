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
#include <utility>

#include "privatefind/errors.h"
#include "privatefind/identity_export.h"
#include "privatefind/network_protocol.h"
#include "privatefind/radio_protocol.h"

namespace privatefind {

namespace {

// Sends `request` to the finder and returns the reply as `Reply`, or Timeout
// if the finder is silent or answers with something else.
template <typename Reply>
absl::StatusOr<Reply> AskFinder(Phone& phone, Simulation& sim,
                                const LinkAddress& finder,
                                const radio::Message& request) {
  auto raw = phone.RadioExchange(sim, finder, radio::Encode(request));
  if (!raw.ok()) return raw.status();
  auto reply = radio::Decode(*raw);
  if (!reply.ok()) return Timeout("undecodable finder reply");
  if (auto* typed = std::get_if<Reply>(&*reply)) return std::move(*typed);
  return Timeout("unexpected finder reply");
}

template <typename Reply>
absl::StatusOr<Reply> AskServer(Phone& phone, Simulation& sim,
                                const std::string& server,
                                const net::Message& request) {
  auto reply = phone.ServerCall(sim, server, request);
  if (!reply.ok()) return reply.status();
  if (auto* typed = std::get_if<Reply>(&*reply)) return std::move(*typed);
  return MakeError(ErrorKind::kNetworkError, "unexpected server reply");
}

struct Decrypted {
  uint32_t counter;
  int64_t received_at_ms;
  VerifiedReport report;
};

}  // namespace

uint64_t CurrentEpoch(const OwnerRecord& record, int64_t now_ms) {
  if (now_ms <= record.setup_time_ms || record.epoch_ms <= 0) return 0;
  return static_cast<uint64_t>((now_ms - record.setup_time_ms) /
                               record.epoch_ms);
}

std::vector<Identifier> CurrentIdWindow(const OwnerRecord& record,
                                        int64_t now_ms, WindowSlack slack) {
  const uint64_t current = CurrentEpoch(record, now_ms);
  const uint64_t first = current > slack.back ? current - slack.back : 0;
  const uint64_t last = current + slack.forward;
  std::vector<Identifier> window;
  window.reserve(last - first + 1);
  Identifier id = RatchetAt(record.e2e_key, record.id_init, first);
  window.push_back(id);
  for (uint64_t epoch = first + 1; epoch <= last; ++epoch) {
    id = RatchetNext(record.e2e_key, id);
    window.push_back(id);
  }
  return window;
}

std::vector<VerifiedReport> AcceptReports(
    OwnerRecord& record, std::span<const StoredReport> found) {
  std::vector<Decrypted> candidates;
  for (const auto& stored : found) {
    auto plaintext = Open(record.e2e_key, stored.e2e_message);
    if (!plaintext.ok() || plaintext->size() != radio::kReportPlaintextSize) {
      continue;
    }
    ByteReader r(*plaintext);
    GeoLocation geo{.lat_e7 = *r.I32(), .lon_e7 = *r.I32()};
    uint32_t counter = *r.U32();
    if (!geo.Validate().ok()) continue;
    candidates.push_back(Decrypted{
        counter, stored.received_at_ms,
        VerifiedReport{.id_rand = stored.id_rand,
                       .geo = geo,
                       .counter = counter,
                       .received_at_ms = stored.received_at_ms}});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Decrypted& a, const Decrypted& b) {
              if (a.counter != b.counter) return a.counter < b.counter;
              return a.received_at_ms < b.received_at_ms;
            });
  std::vector<VerifiedReport> accepted;
  for (auto& c : candidates) {
    if (c.counter <= record.last_counter_seen) continue;
    record.last_counter_seen = c.counter;
    record.last_known_location =
        LastKnownLocation{c.report.geo, c.report.received_at_ms};
    accepted.push_back(c.report);
  }
  record.accepted.insert(record.accepted.end(), accepted.begin(),
                         accepted.end());
  return accepted;
}

OwnerApp::OwnerApp(Phone& phone, Simulation& sim, RandomSource& rng,
                   OwnerOptions options)
    : phone_(phone), sim_(sim), rng_(rng), options_(std::move(options)) {}

const OwnerRecord* OwnerApp::record(const std::string& label) const {
  auto it = records_.find(label);
  return it == records_.end() ? nullptr : &it->second;
}

absl::StatusOr<OwnerRecord*> OwnerApp::MutableRecord(const std::string& label) {
  auto it = records_.find(label);
  if (it == records_.end()) {
    return absl::NotFoundError("no record for " + label);
  }
  return &it->second;
}

absl::StatusOr<const OwnerRecord*> OwnerApp::Store(const std::string& label,
                                                   OwnerRecord record,
                                                   const LinkAddress& finder) {
  if (!options_.mac_randomization) record.finder_address = finder;
  auto [it, inserted] = records_.insert_or_assign(label, std::move(record));
  return &it->second;
}

absl::StatusOr<const OwnerRecord*> OwnerApp::SetupLocal(
    const std::string& label, const LinkAddress& finder, bool reset_id_init) {
  // Resolve before the finder possibly rotates its address on setup.
  auto finder_name = sim_.ResolveRadio(finder.ToString());
  radio::Setup setup{
      .flags = reset_id_init ? radio::kFlagResetIdInit : uint8_t{0},
      .e2e_key = RandomFixed<SecretKey>(rng_)};
  auto ok = AskFinder<radio::SetupOk>(phone_, sim_, finder, setup);
  if (!ok.ok()) return ok.status();
  OwnerRecord record;
  record.id_init = ok->id_init;
  record.e2e_key = setup.e2e_key;
  record.setup_time_ms = sim_.now_ms();
  record.epoch_ms = options_.epoch_ms;
  if (finder_name) sim_.Bind(phone_.name(), *finder_name).IgnoreError();
  return Store(label, std::move(record), finder);
}

absl::StatusOr<const OwnerRecord*> OwnerApp::SetupVerified(
    const std::string& label, const LinkAddress& finder) {
  auto finder_name = sim_.ResolveRadio(finder.ToString());
  auto identity =
      AskFinder<radio::IdentityReply>(phone_, sim_, finder, radio::IdentityRead{});
  if (!identity.ok()) return identity.status();

  auto start = AskServer<net::StartEncryptedSetup>(
      phone_, sim_, options_.server, net::RegisterInit{identity->id_init});
  if (!start.ok()) return start.status();

  auto unwrapped = AskFinder<radio::Ack>(
      phone_, sim_, finder, radio::SetupEncBegin{start->wrapped});
  if (!unwrapped.ok()) {
    // The finder answered IdentityRead, so it is armed and in range; silence
    // here means it could not open the key under its mf-key.
    return AuthFailure("finder could not unwrap the setup key");
  }

  radio::Setup setup{.flags = 0, .e2e_key = RandomFixed<SecretKey>(rng_)};
  auto sealed_ok = AskFinder<radio::SetupOkSealed>(
      phone_, sim_, finder,
      radio::SetupSealed{
          Seal(start->setup_key, radio::EncodeSetupBody(setup), rng_)});
  if (!sealed_ok.ok()) return sealed_ok.status();
  auto body = Open(start->setup_key, sealed_ok->body);
  if (!body.ok()) return body.status();
  auto id_init = Identifier::FromSpan(*body);
  if (!id_init.ok() || *id_init != identity->id_init) {
    return AuthFailure("SetupOK names a different finder");
  }

  OwnerRecord record;
  record.id_init = *id_init;
  record.e2e_key = setup.e2e_key;
  record.setup_time_ms = sim_.now_ms();
  record.epoch_ms = options_.epoch_ms;
  if (finder_name) sim_.Bind(phone_.name(), *finder_name).IgnoreError();
  return Store(label, std::move(record), finder);
}

absl::StatusOr<std::vector<VerifiedReport>> OwnerApp::FetchAndDecrypt(
    const std::string& label) {
  auto record = MutableRecord(label);
  if (!record.ok()) return record.status();
  net::Search search{CurrentIdWindow(**record, sim_.now_ms(), options_.slack),
                     phone_.access_token()};
  auto found = AskServer<net::Found>(phone_, sim_, options_.server, search);
  if (!found.ok()) return found.status();
  return AcceptReports(**record, found->reports);
}

absl::Status OwnerApp::MarkLost(const std::string& label) {
  auto record = MutableRecord(label);
  if (!record.ok()) return record.status();
  return AskServer<net::GenericAck>(
             phone_, sim_, options_.server,
             net::MarkLost{CurrentIdWindow(**record, sim_.now_ms(),
                                           options_.slack)})
      .status();
}

absl::Status OwnerApp::ClearLost(const std::string& label) {
  auto record = MutableRecord(label);
  if (!record.ok()) return record.status();
  return AskServer<net::GenericAck>(
             phone_, sim_, options_.server,
             net::ClearLost{CurrentIdWindow(**record, sim_.now_ms(),
                                            options_.slack)})
      .status();
}

absl::Status OwnerApp::SetOptOut(const std::string& label, bool opt_out) {
  auto record = MutableRecord(label);
  if (!record.ok()) return record.status();
  auto address = ExpectedAddress(**record);
  if (!address) return Timeout("finder address unknown");
  const auto epoch =
      static_cast<uint32_t>(CurrentEpoch(**record, sim_.now_ms()));
  radio::SetOptOut msg{
      .flag = opt_out,
      .epoch = epoch,
      .tag = radio::OptOutTag((*record)->e2e_key, opt_out, epoch)};
  auto ack = AskFinder<radio::Ack>(phone_, sim_, *address, msg);
  if (!ack.ok()) return ack.status();
  (*record)->opt_out_shadow = opt_out;
  return absl::OkStatus();
}

absl::StatusOr<net::AccessToken> OwnerApp::RequestToken(
    const std::string& label) {
  auto record = MutableRecord(label);
  if (!record.ok()) return record.status();
  auto address = ExpectedAddress(**record);
  if (!address) return Timeout("finder address unknown");
  const Identifier id_init = (*record)->id_init;
  auto challenge = AskServer<net::TokenChallenge>(
      phone_, sim_, options_.server, net::TokenChallenge{id_init, std::nullopt});
  if (!challenge.ok()) return challenge.status();
  if (!challenge->challenge) {
    return MakeError(ErrorKind::kNetworkError, "challenge missing");
  }
  auto answer = AskFinder<radio::TokenChallengeAnswer>(
      phone_, sim_, *address, radio::TokenChallengeRelay{*challenge->challenge});
  if (!answer.ok()) return AuthFailure("finder did not answer the challenge");
  auto token = AskServer<net::Token>(phone_, sim_, options_.server,
                                     net::TokenResponse{id_init, answer->nonce});
  if (!token.ok()) return token.status();
  phone_.set_access_token(token->token);
  return token->token;
}

absl::StatusOr<std::string> OwnerApp::ExportIdentity(
    const std::string& label) const {
  const OwnerRecord* r = record(label);
  if (r == nullptr) return absl::NotFoundError("no record for " + label);
  return ExportIdentityText(*r);
}

absl::StatusOr<const OwnerRecord*> OwnerApp::ImportIdentity(
    const std::string& label, std::string_view blob) {
  auto imported = ImportIdentityText(blob);
  if (!imported.ok()) return imported.status();
  auto [it, inserted] = records_.insert_or_assign(label, *std::move(imported));
  return &it->second;
}

std::optional<LinkAddress> OwnerApp::ExpectedAddress(
    const OwnerRecord& record) const {
  if (options_.mac_randomization) {
    return DeriveRandomAddress(
        record.e2e_key,
        static_cast<uint32_t>(CurrentEpoch(record, sim_.now_ms())));
  }
  return record.finder_address;
}

std::vector<LinkAddress> OwnerApp::KnownFinderAddresses() const {
  std::vector<LinkAddress> out;
  for (const auto& [label, record] : records_) {
    if (auto address = ExpectedAddress(record)) out.push_back(*address);
  }
  return out;
}

}  // namespace privatefind
