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

#include <algorithm>
#include <utility>
#include <variant>

namespace privatefind {

namespace {

constexpr std::string_view kTokenLabel = "pf-token";

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int64_t FloorDiv(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

Finder::Finder(ProvisioningRecord provisioning, FinderConfig config,
               std::unique_ptr<RandomSource> rng)
    : config_(config),
      static_address_(provisioning.address),
      address_(provisioning.address),
      rng_(std::move(rng)) {
  state_.id_init = provisioning.id_init;
  state_.mf_key = provisioning.mf_key;
}

ProvisioningRecord Finder::Manufacture(RandomSource& factory_rng,
                                       bool with_mf_key) {
  ProvisioningRecord record;
  record.id_init = RandomFixed<Identifier>(factory_rng);
  if (with_mf_key) record.mf_key = RandomFixed<SecretKey>(factory_rng);
  factory_rng.Fill(record.address.bytes);
  // Static random device address: two most significant bits set.
  record.address.bytes[0] |= 0xC0;
  return record;
}

void Finder::PressButtonHold(int64_t now_ms) {
  state_.setup_mode = true;
  setup_deadline_ms_ = now_ms + config_.setup_timeout_ms;
  session_key_.reset();
}

bool Finder::SetupArmed(int64_t now_ms) const {
  return state_.setup_mode && now_ms < setup_deadline_ms_;
}

void Finder::CompleteSetup(const radio::Setup& setup, bool allow_id_reset,
                           int64_t now_ms) {
  if (allow_id_reset && (setup.flags & radio::kFlagResetIdInit) != 0) {
    state_.id_init = RandomFixed<Identifier>(*rng_);
  }
  state_.e2e_key = setup.e2e_key;
  state_.epoch_counter = 0;
  state_.id_rand = RatchetFirst(*state_.e2e_key, state_.id_init);
  state_.report_counter = 0;
  state_.last_report_ms.reset();
  state_.opt_out = false;
  state_.setup_mode = false;
  state_.last_owner_seen_ms = now_ms;
  session_key_.reset();
  epoch_origin_local_ms_ = now_ms + clock_offset_ms_;
  RefreshAddress();
}

std::optional<radio::SetupOk> Finder::HandleSetupLocal(
    const radio::Setup& setup, int64_t now_ms) {
  if (!SetupArmed(now_ms)) return std::nullopt;
  CompleteSetup(setup, /*allow_id_reset=*/true, now_ms);
  return radio::SetupOk{state_.id_init};
}

std::optional<radio::IdentityReply> Finder::HandleIdentityRead(
    int64_t now_ms) {
  if (!SetupArmed(now_ms)) return std::nullopt;
  return radio::IdentityReply{state_.id_init};
}

std::optional<radio::Ack> Finder::HandleSetupEncBegin(
    const radio::SetupEncBegin& begin, int64_t now_ms) {
  if (!SetupArmed(now_ms) || !state_.mf_key) return std::nullopt;
  auto setup_key = Open(*state_.mf_key, begin.wrapped_setup_key);
  if (!setup_key.ok() || setup_key->size() != SecretKey::kSize) {
    return std::nullopt;
  }
  session_key_ = *SecretKey::FromSpan(*setup_key);
  return radio::Ack{};
}

std::optional<radio::SetupOkSealed> Finder::HandleSetupSealed(
    const radio::SetupSealed& sealed, int64_t now_ms) {
  if (!SetupArmed(now_ms) || !session_key_) return std::nullopt;
  auto body = Open(*session_key_, sealed.body);
  if (!body.ok()) return std::nullopt;
  auto setup = radio::DecodeSetupBody(*body);
  if (!setup.ok()) return std::nullopt;
  const SecretKey session_key = *session_key_;
  // id_init is registered with the manufacturer, so it cannot be reset here.
  CompleteSetup(*setup, /*allow_id_reset=*/false, now_ms);
  return radio::SetupOkSealed{Seal(session_key, state_.id_init.span(), *rng_)};
}

std::optional<radio::IAmLost> Finder::HandleAreYouLost(
    const radio::AreYouLost& msg, int64_t now_ms) {
  if (!state_.e2e_key || state_.connected || state_.opt_out) {
    return std::nullopt;
  }
  if (now_ms - state_.last_owner_seen_ms < config_.lost_threshold_ms) {
    return std::nullopt;
  }
  if (state_.last_report_ms &&
      now_ms - *state_.last_report_ms < config_.report_interval_ms) {
    return std::nullopt;
  }
  state_.report_counter += 1;
  state_.last_report_ms = now_ms;
  Bytes plaintext = radio::EncodeReportPlaintext(msg.geo, state_.report_counter);
  return radio::IAmLost{state_.id_rand,
                        Seal(*state_.e2e_key, plaintext, *rng_)};
}

std::optional<radio::Ack> Finder::HandleSetOptOut(const radio::SetOptOut& msg) {
  if (!state_.e2e_key || msg.epoch != state_.epoch_counter) {
    return std::nullopt;
  }
  Digest expected = radio::OptOutTag(*state_.e2e_key, msg.flag, msg.epoch);
  if (!ConstantTimeEquals(expected, msg.tag)) return std::nullopt;
  state_.opt_out = msg.flag;
  return radio::Ack{};
}

std::optional<radio::TokenChallengeAnswer> Finder::HandleTokenChallenge(
    const radio::TokenChallengeRelay& relay) {
  if (!state_.mf_key || !state_.e2e_key) return std::nullopt;
  auto plaintext = Open(*state_.mf_key, relay.challenge);
  if (!plaintext.ok() ||
      plaintext->size() != radio::kTokenChallengePlaintextSize ||
      !std::equal(kTokenLabel.begin(), kTokenLabel.end(), plaintext->begin())) {
    return std::nullopt;
  }
  radio::TokenChallengeAnswer answer;
  std::copy(plaintext->begin() + kTokenLabel.size(), plaintext->end(),
            answer.nonce.begin());
  return answer;
}

std::optional<Bytes> Finder::HandleFrame(ByteSpan frame, int64_t now_ms) {
  OnTimer(now_ms);
  auto message = radio::Decode(frame);
  if (!message.ok()) return std::nullopt;
  auto wrap = [](const auto& reply) -> std::optional<Bytes> {
    if (!reply) return std::nullopt;
    return radio::Encode(*reply);
  };
  return std::visit(
      Overloaded{
          [&](const radio::Setup& m) {
            return wrap(HandleSetupLocal(m, now_ms));
          },
          [&](const radio::IdentityRead&) {
            return wrap(HandleIdentityRead(now_ms));
          },
          [&](const radio::SetupEncBegin& m) {
            return wrap(HandleSetupEncBegin(m, now_ms));
          },
          [&](const radio::SetupSealed& m) {
            return wrap(HandleSetupSealed(m, now_ms));
          },
          [&](const radio::AreYouLost& m) {
            return wrap(HandleAreYouLost(m, now_ms));
          },
          [&](const radio::SetOptOut& m) { return wrap(HandleSetOptOut(m)); },
          [&](const radio::TokenChallengeRelay& m) {
            return wrap(HandleTokenChallenge(m));
          },
          // Phone-bound messages are ignored.
          [](const auto&) -> std::optional<Bytes> { return std::nullopt; },
      },
      *message);
}

void Finder::TickEpoch() {
  if (!state_.e2e_key) return;
  state_.epoch_counter += 1;
  state_.id_rand = RatchetNext(*state_.e2e_key, state_.id_rand);
  RefreshAddress();
}

void Finder::ApplyClockSkew(int64_t delta_ms, int64_t now_ms) {
  clock_offset_ms_ += delta_ms;
  OnTimer(now_ms);
}

uint32_t Finder::TargetEpoch(int64_t now_ms) const {
  int64_t elapsed = now_ms + clock_offset_ms_ - epoch_origin_local_ms_;
  if (elapsed < 0) return 0;
  return static_cast<uint32_t>(FloorDiv(elapsed, config_.epoch_ms));
}

std::optional<int64_t> Finder::next_timer_ms() const {
  std::optional<int64_t> next;
  if (state_.setup_mode) next = setup_deadline_ms_;
  if (state_.e2e_key) {
    int64_t boundary = epoch_origin_local_ms_ +
                       (int64_t{state_.epoch_counter} + 1) * config_.epoch_ms -
                       clock_offset_ms_;
    next = next ? std::min(*next, boundary) : boundary;
  }
  return next;
}

void Finder::OnTimer(int64_t now_ms) {
  if (state_.setup_mode && now_ms >= setup_deadline_ms_) {
    state_.setup_mode = false;
    session_key_.reset();
  }
  if (!state_.e2e_key) return;
  while (TargetEpoch(now_ms) > state_.epoch_counter) TickEpoch();
}

void Finder::OnConnectionChanged(bool connected, int64_t now_ms) {
  state_.connected = connected;
  state_.last_owner_seen_ms = now_ms;
}

void Finder::OnEnvelope(const Envelope& envelope, Simulation& sim) {
  if (envelope.channel != Channel::kRadio) return;
  auto reply = HandleFrame(envelope.payload, sim.now_ms());
  if (!reply) return;
  sim.Send(Envelope{.src = address_.ToString(),
                    .dst = envelope.src,
                    .channel = Channel::kRadio,
                    .payload = *std::move(reply)})
      .IgnoreError();
}

void Finder::RefreshAddress() {
  if (config_.mac_randomization && state_.e2e_key) {
    address_ = DeriveRandomAddress(*state_.e2e_key, state_.epoch_counter);
  } else {
    address_ = static_address_;
  }
}

}  // namespace privatefind
