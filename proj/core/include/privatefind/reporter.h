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

#ifndef PRIVATEFIND_REPORTER_H_
#define PRIVATEFIND_REPORTER_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "privatefind/geo.h"
#include "privatefind/phone.h"
#include "privatefind/report.h"
#include "privatefind/transport.h"

namespace privatefind {

struct ReporterOptions {
  std::string server = "server";
  // Fetch the server's lost list first and keep only reports for ids on it.
  bool lost_prefilter = false;
};

// Bystander side: asks disconnected finders whether they are lost and relays
// their sealed answers to the server without identifying itself.
class ReporterApp {
 public:
  ReporterApp(Phone& phone, Simulation& sim, ReporterOptions options = {});

  // Addresses of the phone's own finders, skipped during patrols.
  void set_own_finders(std::function<std::vector<LinkAddress>()> provider) {
    own_finders_ = std::move(provider);
  }

  // Scans, sends AreYouLost(here) to every unknown advertising finder and
  // returns the IAmLost answers. Silent finders contribute nothing.
  std::vector<LocationReport> Patrol(const GeoLocation& here);

  // Uploads each report as a bare FoundResponse. The server's ack carries no
  // information, so success only means the upload arrived.
  absl::Status Submit(std::span<const LocationReport> reports);

 private:
  Phone& phone_;
  Simulation& sim_;
  ReporterOptions options_;
  std::function<std::vector<LinkAddress>()> own_finders_;
};

}  // namespace privatefind

#endif  // PRIVATEFIND_REPORTER_H_
