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

#include "privatefind/network_protocol.h"

#include <string>

#include "privatefind/radio_protocol.h"

namespace privatefind::net {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

absl::Status Malformed(Code code, std::string_view why) {
  return absl::InvalidArgumentError(
      "network frame 0x" +
      HexEncode(std::array<uint8_t, 1>{static_cast<uint8_t>(code)}) + ": " +
      std::string(why));
}

void AppendIds(ByteWriter& w, const std::vector<Identifier>& ids) {
  for (const auto& id : ids) w.Append(id.span());
}

absl::StatusOr<std::vector<Identifier>> ReadIds(ByteReader& r, size_t count) {
  std::vector<Identifier> ids;
  ids.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    auto id = r.TakeFixed<Identifier>();
    if (!id.ok()) return id.status();
    ids.push_back(*id);
  }
  return ids;
}

absl::StatusOr<std::optional<AccessToken>> ReadOptionalToken(ByteReader& r,
                                                             Code code) {
  if (r.remaining() == 0) return std::optional<AccessToken>();
  if (r.remaining() != 32) return Malformed(code, "bad trailing token");
  AccessToken token;
  auto bytes = *r.Take(32);
  std::copy(bytes.begin(), bytes.end(), token.begin());
  return std::optional<AccessToken>(token);
}

absl::StatusOr<SealedBox> ReadBox(ByteReader& r, size_t size) {
  auto bytes = r.Take(size);
  if (!bytes.ok()) return bytes.status();
  return SealedBox::Parse(*bytes);
}

absl::StatusOr<Message> DecodePayload(Code code, ByteSpan payload) {
  ByteReader r(payload);
  auto exact = [&](size_t n) -> absl::Status {
    if (payload.size() != n) {
      return Malformed(code, "payload length " +
                                 std::to_string(payload.size()) +
                                 ", expected " + std::to_string(n));
    }
    return absl::OkStatus();
  };
  switch (code) {
    case Code::kRegisterInit: {
      if (auto s = exact(32); !s.ok()) return s;
      return RegisterInit{*r.TakeFixed<Identifier>()};
    }
    case Code::kStartEncryptedSetup: {
      if (auto s = exact(32 + radio::kWrappedKeySize); !s.ok()) return s;
      StartEncryptedSetup m;
      m.setup_key = *r.TakeFixed<SecretKey>();
      m.wrapped = *ReadBox(r, radio::kWrappedKeySize);
      return m;
    }
    case Code::kFoundResponse: {
      if (payload.size() != kFoundResponseSize &&
          payload.size() != kFoundResponseSize + 32) {
        return Malformed(code, "report must be 92 bytes (+32 token)");
      }
      FoundResponse m;
      m.report.id_rand = *r.TakeFixed<Identifier>();
      m.report.e2e_message = *ReadBox(r, radio::kE2eMessageSize);
      auto token = ReadOptionalToken(r, code);
      if (!token.ok()) return token.status();
      m.token = *token;
      return m;
    }
    case Code::kGenericAck: {
      if (auto s = exact(1); !s.ok()) return s;
      if (payload[0] != 0) return Malformed(code, "non-zero ack status");
      return GenericAck{};
    }
    case Code::kSearch: {
      auto count = r.U8();
      if (!count.ok()) return Malformed(code, "missing count");
      auto ids = ReadIds(r, *count);
      if (!ids.ok()) return Malformed(code, "truncated id list");
      auto token = ReadOptionalToken(r, code);
      if (!token.ok()) return token.status();
      return Search{*std::move(ids), *token};
    }
    case Code::kFound: {
      auto count = r.U16();
      if (!count.ok()) return Malformed(code, "missing count");
      if (auto s = exact(2 + size_t{*count} * (32 + radio::kE2eMessageSize + 8));
          !s.ok()) {
        return s;
      }
      Found m;
      for (uint16_t i = 0; i < *count; ++i) {
        StoredReport report;
        report.id_rand = *r.TakeFixed<Identifier>();
        report.e2e_message = *ReadBox(r, radio::kE2eMessageSize);
        report.received_at_ms = *r.I64();
        m.reports.push_back(std::move(report));
      }
      return m;
    }
    case Code::kMarkLost:
    case Code::kClearLost: {
      auto count = r.U8();
      if (!count.ok()) return Malformed(code, "missing count");
      if (auto s = exact(1 + size_t{*count} * 32); !s.ok()) return s;
      auto ids = *ReadIds(r, *count);
      if (code == Code::kMarkLost) return MarkLost{std::move(ids)};
      return ClearLost{std::move(ids)};
    }
    case Code::kGetLostIds: {
      if (auto s = exact(0); !s.ok()) return s;
      return GetLostIds{};
    }
    case Code::kLostIds: {
      auto count = r.U16();
      if (!count.ok()) return Malformed(code, "missing count");
      if (auto s = exact(2 + size_t{*count} * 32); !s.ok()) return s;
      return LostIds{*ReadIds(r, *count)};
    }
    case Code::kTokenChallenge: {
      if (payload.size() != 32 &&
          payload.size() != 32 + radio::kSealedTokenChallengeSize) {
        return Malformed(code, "bad token challenge length");
      }
      TokenChallenge m;
      m.id_init = *r.TakeFixed<Identifier>();
      if (r.remaining() > 0) {
        m.challenge = *ReadBox(r, radio::kSealedTokenChallengeSize);
      }
      return m;
    }
    case Code::kTokenResponse: {
      if (auto s = exact(64); !s.ok()) return s;
      TokenResponse m;
      m.id_init = *r.TakeFixed<Identifier>();
      auto nonce = *r.Take(32);
      std::copy(nonce.begin(), nonce.end(), m.nonce.begin());
      return m;
    }
    case Code::kToken: {
      if (auto s = exact(32); !s.ok()) return s;
      Token m;
      std::copy(payload.begin(), payload.end(), m.token.begin());
      return m;
    }
    case Code::kError: {
      if (auto s = exact(1); !s.ok()) return s;
      if (payload[0] < 1 || payload[0] > 6) {
        return Malformed(code, "unknown error code");
      }
      return Error{static_cast<ErrorCode>(payload[0])};
    }
  }
  return absl::InvalidArgumentError("unknown network message code");
}

}  // namespace

absl::StatusOr<Frame> ParseFrame(ByteSpan bytes) {
  ByteReader r(bytes);
  auto code = r.U8();
  auto length = r.U32();
  if (!code.ok() || !length.ok()) {
    return absl::InvalidArgumentError("truncated frame header");
  }
  if (r.remaining() != *length) {
    return absl::InvalidArgumentError("frame length mismatch");
  }
  return Frame{static_cast<Code>(*code), r.rest()};
}

Bytes Encode(const Message& message) {
  ByteWriter body;
  Code code = std::visit(
      Overloaded{
          [&](const RegisterInit& m) {
            body.Append(m.id_init.span());
            return Code::kRegisterInit;
          },
          [&](const StartEncryptedSetup& m) {
            body.Append(m.setup_key.span()).Append(m.wrapped.Serialize());
            return Code::kStartEncryptedSetup;
          },
          [&](const FoundResponse& m) {
            body.Append(m.report.id_rand.span())
                .Append(m.report.e2e_message.Serialize());
            if (m.token) body.Append(*m.token);
            return Code::kFoundResponse;
          },
          [&](const GenericAck&) {
            body.U8(0);
            return Code::kGenericAck;
          },
          [&](const Search& m) {
            body.U8(static_cast<uint8_t>(m.ids.size()));
            AppendIds(body, m.ids);
            if (m.token) body.Append(*m.token);
            return Code::kSearch;
          },
          [&](const Found& m) {
            body.U16(static_cast<uint16_t>(m.reports.size()));
            for (const auto& report : m.reports) {
              body.Append(report.id_rand.span())
                  .Append(report.e2e_message.Serialize())
                  .I64(report.received_at_ms);
            }
            return Code::kFound;
          },
          [&](const MarkLost& m) {
            body.U8(static_cast<uint8_t>(m.ids.size()));
            AppendIds(body, m.ids);
            return Code::kMarkLost;
          },
          [&](const ClearLost& m) {
            body.U8(static_cast<uint8_t>(m.ids.size()));
            AppendIds(body, m.ids);
            return Code::kClearLost;
          },
          [&](const GetLostIds&) { return Code::kGetLostIds; },
          [&](const LostIds& m) {
            body.U16(static_cast<uint16_t>(m.ids.size()));
            AppendIds(body, m.ids);
            return Code::kLostIds;
          },
          [&](const TokenChallenge& m) {
            body.Append(m.id_init.span());
            if (m.challenge) body.Append(m.challenge->Serialize());
            return Code::kTokenChallenge;
          },
          [&](const TokenResponse& m) {
            body.Append(m.id_init.span()).Append(m.nonce);
            return Code::kTokenResponse;
          },
          [&](const Token& m) {
            body.Append(m.token);
            return Code::kToken;
          },
          [&](const Error& m) {
            body.U8(static_cast<uint8_t>(m.code));
            return Code::kError;
          },
      },
      message);
  ByteWriter frame;
  frame.U8(static_cast<uint8_t>(code))
      .U32(static_cast<uint32_t>(body.bytes().size()))
      .Append(body.bytes());
  return frame.Take();
}

absl::StatusOr<Message> Decode(ByteSpan bytes) {
  auto frame = ParseFrame(bytes);
  if (!frame.ok()) return frame.status();
  return DecodePayload(frame->code, frame->payload);
}

ErrorKind KindForErrorCode(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownFinder:
      return ErrorKind::kServerUnknownFinder;
    case ErrorCode::kMalformedReport:
      return ErrorKind::kMalformedReport;
    case ErrorCode::kTokenRequired:
      return ErrorKind::kTokenRequired;
    case ErrorCode::kTooManyIds:
      return ErrorKind::kTooManyIds;
    case ErrorCode::kAuthFailure:
      return ErrorKind::kAuthFailure;
    case ErrorCode::kBadRequest:
      return ErrorKind::kOther;
  }
  return ErrorKind::kOther;
}

}  // namespace privatefind::net
