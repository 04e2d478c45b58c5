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

#ifndef PRIVATEFIND_FINDER_H_
#define PRIVATEFIND_FINDER_H_

#include <cstdint>
#include <memory>
#include <optional>

#include "privatefind/crypto.h"
#include "privatefind/radio_protocol.h"
#include "privatefind/random.h"
#include "privatefind/transport.h"

namespace privatefind {

struct FinderConfig {
  int64_t epoch_ms = kDefaultEpochMs;
  // Owner absence required before the finder answers AreYouLost.
  int64_t lost_threshold_ms = 300'000;
  // Minimum spacing between two IAmLost replies.
  int64_t report_interval_ms = 60'000;
  // Setup mode disarms itself after this long.
  int64_t setup_timeout_ms = 60'000;
  bool mac_randomization = false;
};

// Factory output for one device.
struct ProvisioningRecord {
  Identifier id_init;
  std::optional<SecretKey> mf_key;
  LinkAddress address;
};

struct FinderState {
  Identifier id_init;
  std::optional<SecretKey> mf_key;
  std::optional<SecretKey> e2e_key;
  Identifier id_rand;
  uint32_t epoch_counter = 0;
  bool setup_mode = false;
  bool connected = false;
  int64_t last_owner_seen_ms = 0;
  bool opt_out = false;
  uint32_t report_counter = 0;
  std::optional<int64_t> last_report_ms;
};

// Firmware state machine of one finder. Handle* methods implement the
// protocol directly and are usable without a Simulation; OnEnvelope wires
// them to the radio channel. Every refusal is silence on the wire.
class Finder final : public RadioDevice {
 public:
  Finder(ProvisioningRecord provisioning, FinderConfig config,
         std::unique_ptr<RandomSource> rng);

  static ProvisioningRecord Manufacture(RandomSource& factory_rng,
                                        bool with_mf_key = true);

  const FinderState& state() const { return state_; }
  const FinderConfig& config() const { return config_; }

  // Owner pushes and holds the button. Arms setup mode until a setup
  // completes or setup_timeout_ms passes.
  void PressButtonHold(int64_t now_ms);

  std::optional<radio::SetupOk> HandleSetupLocal(const radio::Setup& setup,
                                                 int64_t now_ms);
  std::optional<radio::IdentityReply> HandleIdentityRead(int64_t now_ms);
  // Unwraps the setup key with mf_key and opens the encrypted session. Ack
  // on success.
  std::optional<radio::Ack> HandleSetupEncBegin(
      const radio::SetupEncBegin& begin, int64_t now_ms);
  std::optional<radio::SetupOkSealed> HandleSetupSealed(
      const radio::SetupSealed& sealed, int64_t now_ms);
  std::optional<radio::IAmLost> HandleAreYouLost(const radio::AreYouLost& msg,
                                                 int64_t now_ms);
  std::optional<radio::Ack> HandleSetOptOut(const radio::SetOptOut& msg);
  std::optional<radio::TokenChallengeAnswer> HandleTokenChallenge(
      const radio::TokenChallengeRelay& relay);

  // Raw frame in, raw reply (if any) out.
  std::optional<Bytes> HandleFrame(ByteSpan frame, int64_t now_ms);

  // Advances the ratchet by one epoch (and the link address with it).
  void TickEpoch();

  // Shifts the finder's local clock, e.g. to model drift. Positive values
  // run ahead of simulation time.
  void ApplyClockSkew(int64_t delta_ms, int64_t now_ms);

  // RadioDevice
  LinkAddress link_address() const override { return address_; }
  bool advertising() const override { return !state_.connected; }
  std::optional<int64_t> next_timer_ms() const override;
  void OnTimer(int64_t now_ms) override;
  void OnConnectionChanged(bool connected, int64_t now_ms) override;
  void OnEnvelope(const Envelope& envelope, Simulation& sim) override;

 private:
  bool SetupArmed(int64_t now_ms) const;
  void CompleteSetup(const radio::Setup& setup, bool allow_id_reset,
                     int64_t now_ms);
  uint32_t TargetEpoch(int64_t now_ms) const;
  void RefreshAddress();

  FinderConfig config_;
  FinderState state_;
  LinkAddress static_address_;
  LinkAddress address_;
  std::unique_ptr<RandomSource> rng_;

  int64_t setup_deadline_ms_ = 0;
  std::optional<SecretKey> session_key_;
  // Epoch zero starts here, measured on the finder's own clock.
  int64_t epoch_origin_local_ms_ = 0;
  int64_t clock_offset_ms_ = 0;
};

}  // namespace privatefind

#endif  // PRIVATEFIND_FINDER_H_
