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

// privatefind: manufacture finders, run scenario scripts, audit transcripts.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "privatefind/audit.h"
#include "privatefind/manufacture.h"
#include "privatefind/random.h"
#include "privatefind/scenario.h"
#include "privatefind/scenario_runner.h"
#include "privatefind/server.h"

namespace pf = privatefind;

namespace {

bool ParseProbability(std::string_view text, double& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && out >= 0.0 && out <= 1.0;
}

// "<p>" applies to both channels; "radio=<p>" or "network=<p>" to one.
bool ApplyDropProb(const std::string& spec, pf::RunOverrides& overrides) {
  size_t eq = spec.find('=');
  double p = 0;
  if (eq == std::string::npos) {
    if (!ParseProbability(spec, p)) return false;
    overrides.drop_radio = p;
    overrides.drop_network = p;
    return true;
  }
  const std::string channel = spec.substr(0, eq);
  if (!ParseProbability(std::string_view(spec).substr(eq + 1), p)) {
    return false;
  }
  if (channel == "radio") {
    overrides.drop_radio = p;
  } else if (channel == "network") {
    overrides.drop_network = p;
  } else {
    return false;
  }
  return true;
}

int CmdManufacture(size_t count, uint64_t seed, const std::string& registry,
                   const std::string& out_dir) {
  pf::DeterministicRandom rng(seed, "factory");
  pf::ManufactureBatch batch = pf::Manufacture(count, rng);
  auto paths = pf::WriteManufactureBatch(batch, registry, out_dir);
  if (!paths.ok()) {
    std::cerr << "manufacture: " << paths.status().message() << "\n";
    return pf::kExitScenarioFailure;
  }
  std::cout << "registry " << registry << " entries=" << batch.registry.size()
            << "\n";
  for (const std::string& path : *paths) std::cout << "finder " << path << "\n";
  return pf::kExitOk;
}

int CmdRun(const std::string& scenario_path, pf::RunOverrides overrides,
           const std::string& out_dir) {
  auto scenario = pf::LoadScenario(scenario_path);
  if (!scenario.ok()) {
    std::cerr << scenario_path << ": " << scenario.status().message() << "\n";
    return pf::kExitParseError;
  }
  overrides.base_dir =
      std::filesystem::path(scenario_path).parent_path().string();
  if (!out_dir.empty()) overrides.state_dir = out_dir;
  pf::RunResult result = pf::RunScenario(*scenario, overrides);
  std::cout << result.summary;
  if (!out_dir.empty()) {
    if (absl::Status s = pf::WriteRunArtifacts(result, out_dir); !s.ok()) {
      std::cerr << "run: " << s.message() << "\n";
      if (result.exit_code == pf::kExitOk) return pf::kExitScenarioFailure;
    }
  }
  for (const auto& finding : result.audit.findings) {
    std::cerr << "audit: envelope " << finding.envelope_index << ": "
              << finding.what << "\n";
  }
  return result.exit_code;
}

int CmdAudit(const std::string& transcript_path,
             const std::string& scenario_path,
             std::optional<pf::TokenPolicy> policy) {
  auto scenario = pf::LoadScenario(scenario_path);
  if (!scenario.ok()) {
    std::cerr << scenario_path << ": " << scenario.status().message() << "\n";
    return pf::kExitParseError;
  }
  auto transcript = pf::Transcript::ReadJsonLines(transcript_path);
  if (!transcript.ok()) {
    std::cerr << transcript_path << ": " << transcript.status().message()
              << "\n";
    return pf::kExitParseError;
  }
  pf::AuditSpec spec;
  spec.locations = scenario->locations;
  spec.token_policy = policy.value_or(scenario->settings.token_policy);
  pf::AuditResult result = pf::AuditTranscript(*transcript, spec);
  std::cout << result.SummaryLine() << "\n";
  for (const auto& finding : result.findings) {
    std::cout << "finding envelope=" << finding.envelope_index << " "
              << finding.what << "\n";
  }
  return result.pass() ? pf::kExitOk : pf::kExitAuditFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PrivateFind finder network simulator"};
  app.require_subcommand(1);

  std::optional<uint64_t> seed;
  std::optional<int64_t> epoch_ms;
  std::string registry;
  std::string out_dir;
  std::string token_policy;
  std::string mac_randomization;
  std::string drop_prob;

  auto* manufacture = app.add_subcommand("manufacture",
                                         "Provision finders and a registry");
  size_t count = 1;
  manufacture->add_option("--count", count, "Number of finders")
      ->check(CLI::NonNegativeNumber);
  manufacture->add_option("--seed", seed, "Factory RNG seed");
  manufacture->add_option("--registry", registry, "Registry output path")
      ->required();
  manufacture->add_option("--out", out_dir, "Provisioning record directory")
      ->required();

  auto* run = app.add_subcommand("run", "Run a scenario script");
  std::string scenario_path;
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--seed", seed, "Override the script seed");
  run->add_option("--epoch-ms", epoch_ms, "Override the epoch length")
      ->check(CLI::PositiveNumber);
  run->add_option("--registry", registry,
                  "Extra registry entries for provisioned finders");
  run->add_option("--out", out_dir,
                  "Directory for transcript.jsonl, summary.txt, server.log");
  run->add_option("--token-policy", token_policy, "off|ingest|search|both")
      ->check(CLI::IsMember({"off", "ingest", "search", "both"}));
  run->add_option("--mac-randomization", mac_randomization, "on|off")
      ->check(CLI::IsMember({"on", "off"}));
  run->add_option("--drop-prob", drop_prob,
                  "Loss probability: <p>, radio=<p> or network=<p>");

  auto* audit = app.add_subcommand("audit", "Privacy-audit a transcript");
  std::string transcript_path;
  audit->add_option("transcript", transcript_path, "transcript.jsonl")
      ->required();
  audit->add_option("scenario", scenario_path, "Scenario file")->required();
  audit->add_option("--token-policy", token_policy, "off|ingest|search|both")
      ->check(CLI::IsMember({"off", "ingest", "search", "both"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? pf::kExitOk : pf::kExitParseError;
  }

  std::optional<pf::TokenPolicy> policy;
  if (!token_policy.empty()) policy = *pf::ParseTokenPolicy(token_policy);

  if (*manufacture) {
    return CmdManufacture(count, seed.value_or(1), registry, out_dir);
  }
  if (*run) {
    pf::RunOverrides overrides;
    overrides.seed = seed;
    overrides.epoch_ms = epoch_ms;
    overrides.token_policy = policy;
    if (!mac_randomization.empty()) {
      overrides.mac_randomization = mac_randomization == "on";
    }
    if (!drop_prob.empty() && !ApplyDropProb(drop_prob, overrides)) {
      std::cerr << "--drop-prob: expected <p>, radio=<p> or network=<p>\n";
      return pf::kExitParseError;
    }
    overrides.registry_path = registry;
    return CmdRun(scenario_path, overrides, out_dir);
  }
  return CmdAudit(transcript_path, scenario_path, policy);
}
