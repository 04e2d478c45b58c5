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

#include "privatefind/radio_protocol.h"

#include <string>
#include <type_traits>

namespace privatefind::radio {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

absl::Status WrongLength(Code code, size_t got) {
  return absl::InvalidArgumentError(
      "radio frame 0x" + HexEncode(std::array<uint8_t, 1>{
                             static_cast<uint8_t>(code)}) +
      " has bad payload length " + std::to_string(got));
}

absl::StatusOr<SealedBox> ParseSealed(ByteSpan payload, size_t expected,
                                      Code code) {
  if (payload.size() != expected) return WrongLength(code, payload.size());
  return SealedBox::Parse(payload);
}

}  // namespace

Bytes Encode(const Message& message) {
  ByteWriter w;
  std::visit(
      Overloaded{
          [&](const Setup& m) {
            w.U8(static_cast<uint8_t>(Code::kSetup))
                .U8(m.flags)
                .Append(m.e2e_key.span());
          },
          [&](const SetupOk& m) {
            w.U8(static_cast<uint8_t>(Code::kSetupOk)).Append(m.id_init.span());
          },
          [&](const SetupEncBegin& m) {
            w.U8(static_cast<uint8_t>(Code::kSetupEncBegin))
                .Append(m.wrapped_setup_key.Serialize());
          },
          [&](const AreYouLost& m) {
            w.U8(static_cast<uint8_t>(Code::kAreYouLost))
                .I32(m.geo.lat_e7)
                .I32(m.geo.lon_e7);
          },
          [&](const IAmLost& m) {
            w.U8(static_cast<uint8_t>(Code::kIAmLost))
                .Append(m.id_rand.span())
                .Append(m.e2e_message.Serialize());
          },
          [&](const SetOptOut& m) {
            w.U8(static_cast<uint8_t>(Code::kSetOptOut))
                .U8(m.flag ? 1 : 0)
                .U32(m.epoch)
                .Append(m.tag);
          },
          [&](const Ack&) { w.U8(static_cast<uint8_t>(Code::kAck)); },
          [&](const IdentityRead&) {
            w.U8(static_cast<uint8_t>(Code::kIdentityRead));
          },
          [&](const IdentityReply& m) {
            w.U8(static_cast<uint8_t>(Code::kIdentityReply))
                .Append(m.id_init.span());
          },
          [&](const SetupSealed& m) {
            w.U8(static_cast<uint8_t>(Code::kSetupSealed))
                .Append(m.body.Serialize());
          },
          [&](const SetupOkSealed& m) {
            w.U8(static_cast<uint8_t>(Code::kSetupOkSealed))
                .Append(m.body.Serialize());
          },
          [&](const TokenChallengeRelay& m) {
            w.U8(static_cast<uint8_t>(Code::kTokenChallengeRelay))
                .Append(m.challenge.Serialize());
          },
          [&](const TokenChallengeAnswer& m) {
            w.U8(static_cast<uint8_t>(Code::kTokenChallengeAnswer))
                .Append(m.nonce);
          },
      },
      message);
  return w.Take();
}

absl::StatusOr<Message> Decode(ByteSpan frame) {
  if (frame.empty()) return absl::InvalidArgumentError("empty radio frame");
  const auto code = static_cast<Code>(frame[0]);
  ByteSpan payload = frame.subspan(1);
  ByteReader r(payload);
  switch (code) {
    case Code::kSetup: {
      if (payload.size() != kSetupBodySize) {
        return WrongLength(code, payload.size());
      }
      return DecodeSetupBody(payload);
    }
    case Code::kSetupOk: {
      if (payload.size() != 32) return WrongLength(code, payload.size());
      return SetupOk{*Identifier::FromSpan(payload)};
    }
    case Code::kSetupEncBegin: {
      auto box = ParseSealed(payload, kWrappedKeySize, code);
      if (!box.ok()) return box.status();
      return SetupEncBegin{*std::move(box)};
    }
    case Code::kAreYouLost: {
      if (payload.size() != 8) return WrongLength(code, payload.size());
      auto geo = GeoLocation::Decode(payload);
      if (!geo.ok()) return geo.status();
      return AreYouLost{*geo};
    }
    case Code::kIAmLost: {
      if (payload.size() != 32 + kE2eMessageSize) {
        return WrongLength(code, payload.size());
      }
      auto id = r.TakeFixed<Identifier>();
      auto box = SealedBox::Parse(r.rest());
      if (!box.ok()) return box.status();
      return IAmLost{*id, *std::move(box)};
    }
    case Code::kSetOptOut: {
      if (payload.size() != 1 + 4 + 32) {
        return WrongLength(code, payload.size());
      }
      SetOptOut m;
      uint8_t flag = *r.U8();
      if (flag > 1) return absl::InvalidArgumentError("bad opt-out flag");
      m.flag = flag == 1;
      m.epoch = *r.U32();
      auto tag = *r.Take(32);
      std::copy(tag.begin(), tag.end(), m.tag.begin());
      return m;
    }
    case Code::kAck:
      if (!payload.empty()) return WrongLength(code, payload.size());
      return Ack{};
    case Code::kIdentityRead:
      if (!payload.empty()) return WrongLength(code, payload.size());
      return IdentityRead{};
    case Code::kIdentityReply: {
      if (payload.size() != 32) return WrongLength(code, payload.size());
      return IdentityReply{*Identifier::FromSpan(payload)};
    }
    case Code::kSetupSealed: {
      auto box = ParseSealed(payload, kSealedSetupSize, code);
      if (!box.ok()) return box.status();
      return SetupSealed{*std::move(box)};
    }
    case Code::kSetupOkSealed: {
      auto box = ParseSealed(payload, kSealedSetupOkSize, code);
      if (!box.ok()) return box.status();
      return SetupOkSealed{*std::move(box)};
    }
    case Code::kTokenChallengeRelay: {
      auto box = ParseSealed(payload, kSealedTokenChallengeSize, code);
      if (!box.ok()) return box.status();
      return TokenChallengeRelay{*std::move(box)};
    }
    case Code::kTokenChallengeAnswer: {
      if (payload.size() != 32) return WrongLength(code, payload.size());
      TokenChallengeAnswer m;
      std::copy(payload.begin(), payload.end(), m.nonce.begin());
      return m;
    }
  }
  return absl::InvalidArgumentError("unknown radio code");
}

Bytes EncodeSetupBody(const Setup& setup) {
  ByteWriter w;
  w.U8(setup.flags).Append(setup.e2e_key.span());
  return w.Take();
}

absl::StatusOr<Setup> DecodeSetupBody(ByteSpan body) {
  if (body.size() != kSetupBodySize) {
    return absl::InvalidArgumentError("bad setup body length");
  }
  ByteReader r(body);
  Setup setup;
  setup.flags = *r.U8();
  setup.e2e_key = *r.TakeFixed<SecretKey>();
  return setup;
}

Bytes EncodeReportPlaintext(const GeoLocation& geo, uint32_t counter) {
  ByteWriter w;
  w.I32(geo.lat_e7).I32(geo.lon_e7).U32(counter);
  return w.Take();
}

Digest OptOutTag(const SecretKey& e2e_key, bool flag, uint32_t epoch) {
  ByteWriter w;
  w.Append(std::string_view("optout")).U8(flag ? 1 : 0).U32(epoch);
  return HmacSha256(e2e_key.span(), w.bytes());
}

}  // namespace privatefind::radio
