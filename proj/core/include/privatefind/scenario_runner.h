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

#ifndef PRIVATEFIND_SCENARIO_RUNNER_H_
#define PRIVATEFIND_SCENARIO_RUNNER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "privatefind/audit.h"
#include "privatefind/owner.h"
#include "privatefind/scenario.h"
#include "privatefind/transport.h"

namespace privatefind {

inline constexpr int kExitOk = 0;
inline constexpr int kExitScenarioFailure = 2;
inline constexpr int kExitAuditFailure = 3;
inline constexpr int kExitParseError = 4;

// Command-line values that take precedence over the script's settings.
struct RunOverrides {
  std::optional<uint64_t> seed;
  std::optional<int64_t> epoch_ms;
  std::optional<TokenPolicy> token_policy;
  std::optional<bool> mac_randomization;
  std::optional<double> drop_radio;
  std::optional<double> drop_network;
  // Extra registry entries, e.g. for finders declared with provision=.
  std::string registry_path;
  // Relative provision= paths resolve against this directory.
  std::string base_dir;
  // Server log lives here when set; otherwise a temporary file is used if
  // the script restarts the server.
  std::string state_dir;
};

struct OwnerReportLine {
  std::string phone;
  std::string finder;
  VerifiedReport report;
};

struct RunResult {
  int exit_code = kExitOk;
  ScenarioSettings settings;
  Transcript transcript;
  AuditResult audit;
  // First failing step, if any.
  absl::Status failure;
  int failed_line = 0;
  std::string failed_step;
  // Reports accepted by fetch steps, in order.
  std::vector<OwnerReportLine> reports;
  // Replies collected by each phone's most recent patrol.
  std::map<std::string, size_t> last_patrol;
  std::string summary;
};

// Runs every step in order and stops at the first failure. The audit runs
// either way; an audit failure takes precedence in the exit code.
RunResult RunScenario(const Scenario& scenario,
                      const RunOverrides& overrides = {});

// <out_dir>/transcript.jsonl and <out_dir>/summary.txt.
absl::Status WriteRunArtifacts(const RunResult& result,
                               const std::string& out_dir);

}  // namespace privatefind

#endif  // PRIVATEFIND_SCENARIO_RUNNER_H_
