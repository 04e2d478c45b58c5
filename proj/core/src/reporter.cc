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

#include "privatefind/reporter.h"

#include <algorithm>
#include <set>
#include <utility>

#include "privatefind/errors.h"
#include "privatefind/network_protocol.h"
#include "privatefind/radio_protocol.h"

namespace privatefind {

ReporterApp::ReporterApp(Phone& phone, Simulation& sim,
                         ReporterOptions options)
    : phone_(phone), sim_(sim), options_(std::move(options)) {}

std::vector<LocationReport> ReporterApp::Patrol(const GeoLocation& here) {
  std::vector<LinkAddress> own;
  if (own_finders_) own = own_finders_();

  std::vector<LocationReport> reports;
  const Bytes request = radio::Encode(radio::AreYouLost{here});
  for (const LinkAddress& address : sim_.Scan(phone_.name())) {
    if (std::find(own.begin(), own.end(), address) != own.end()) continue;
    auto raw = phone_.RadioExchange(sim_, address, request);
    if (!raw.ok()) continue;
    auto reply = radio::Decode(*raw);
    if (!reply.ok()) continue;
    if (auto* lost = std::get_if<radio::IAmLost>(&*reply)) {
      reports.push_back(LocationReport{lost->id_rand, lost->e2e_message});
    }
  }

  if (options_.lost_prefilter && !reports.empty()) {
    auto listed = phone_.ServerCall(sim_, options_.server, net::GetLostIds{});
    std::set<Identifier> lost;
    if (listed.ok()) {
      if (auto* ids = std::get_if<net::LostIds>(&*listed)) {
        lost.insert(ids->ids.begin(), ids->ids.end());
      }
    }
    std::erase_if(reports, [&](const LocationReport& r) {
      return !lost.contains(r.id_rand);
    });
  }
  return reports;
}

absl::Status ReporterApp::Submit(std::span<const LocationReport> reports) {
  for (const auto& report : reports) {
    auto reply = phone_.ServerCall(
        sim_, options_.server,
        net::FoundResponse{report, phone_.access_token()});
    if (!reply.ok()) return reply.status();
    if (!std::holds_alternative<net::GenericAck>(*reply)) {
      return MakeError(ErrorKind::kNetworkError, "unexpected server reply");
    }
  }
  return absl::OkStatus();
}

}  // namespace privatefind
