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

// Line-oriented scenario scripts. One statement per line, '#' starts a
// comment. Settings and actor declarations may appear anywhere; steps run in
// file order.
//
//   seed <u64>                      epoch_ms <ms>
//   mac_randomization on|off        token_policy off|ingest|search|both
//   drop_prob radio|network <p>
//   phone <name>
//   finder <name> [genuine|counterfeit|unregistered|legacy|provision=<file>]
//
// Steps (durations take a unit: ms, s, m, h, d, or e for epochs):
//
//   move <phone> [<finder>...]      press_button <finder>
//   setup_local <phone> <finder> [reset_id]
//   setup_verified <phone> <finder>
//   advance <duration>              skew <finder> <signed duration>
//   patrol <phone> <lat> <lon>      submit <phone>        replay <phone>
//   fetch <phone> <finder>          mark_lost <phone> <finder>
//   clear_lost <phone> <finder>     set_opt_out <phone> <finder> on|off
//   export <phone> <finder> <slot>  import <phone> <slot> <finder>
//   request_token <phone> <finder>  restart_server
//   expect_patrol <phone> <n>       expect_reports <phone> <finder> <n>
//   expect_location <phone> <finder> <lat> <lon>
//   expect_error <ErrorKind> <step...>

#ifndef PRIVATEFIND_SCENARIO_H_
#define PRIVATEFIND_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "privatefind/crypto.h"
#include "privatefind/geo.h"
#include "privatefind/server.h"
#include "privatefind/transport.h"

namespace privatefind {

struct ScenarioSettings {
  uint64_t seed = 1;
  int64_t epoch_ms = kDefaultEpochMs;
  bool mac_randomization = false;
  TokenPolicy token_policy = TokenPolicy::kOff;
  double drop_radio = 0.0;
  double drop_network = 0.0;
};

enum class FinderKind {
  kGenuine,       // factory mf_key, listed in the registry
  kCounterfeit,   // carries an mf_key the registry does not know
  kUnregistered,  // genuine device whose id_init is missing from the registry
  kLegacy,        // no mf_key at all
  kProvisioned,   // loaded from a manufacture output file
};

struct ActorDecl {
  enum class Role { kPhone, kFinder };
  Role role = Role::kPhone;
  std::string name;
  FinderKind kind = FinderKind::kGenuine;
  std::string provision_path;
  int line = 0;
};

struct Step {
  int line = 0;
  std::string verb;
  std::vector<std::string> args;

  std::string ToString() const;
};

struct Scenario {
  std::string name;
  ScenarioSettings settings;
  std::vector<ActorDecl> actors;
  std::vector<Step> steps;
  // Every coordinate named by a patrol or expect_location step.
  std::vector<GeoLocation> locations;

  const ActorDecl* FindActor(std::string_view name) const;
};

// ParseError on the first bad line, with its line number.
absl::StatusOr<Scenario> ParseScenario(std::string_view text,
                                       std::string name = "scenario");
// Name defaults to the file stem.
absl::StatusOr<Scenario> LoadScenario(const std::string& path);

// "<int><unit>" with unit ms|s|m|h|d|e; `e` multiplies by epoch_ms.
absl::StatusOr<int64_t> ParseDuration(std::string_view text, int64_t epoch_ms,
                                      bool allow_negative = false);

}  // namespace privatefind

#endif  // PRIVATEFIND_SCENARIO_H_
