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

#include "privatefind/scenario_runner.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <utility>

#include "privatefind/errors.h"
#include "privatefind/finder.h"
#include "privatefind/manufacture.h"
#include "privatefind/phone.h"
#include "privatefind/reporter.h"
#include "privatefind/server.h"

namespace privatefind {

namespace {

namespace fs = std::filesystem;

constexpr char kServerName[] = "server";

absl::Status StepError(std::string_view what) {
  return MakeError(ErrorKind::kOther, what);
}

std::string ReadFileOrEmpty(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct PhoneActor {
  std::unique_ptr<Phone> phone;
  std::unique_ptr<DeterministicRandom> rng;
  std::unique_ptr<OwnerApp> owner;
  std::unique_ptr<ReporterApp> reporter;
  std::vector<LocationReport> pending;
  std::vector<LocationReport> submitted;
};

class Runner {
 public:
  Runner(const Scenario& scenario, const RunOverrides& overrides)
      : scenario_(scenario),
        overrides_(overrides),
        settings_(EffectiveSettings(scenario.settings, overrides)),
        sim_(settings_.seed) {}

  ~Runner() {
    server_.reset();
    if (!temp_log_.empty()) {
      std::error_code ec;
      fs::remove(temp_log_, ec);
    }
  }

  RunResult Run();

 private:
  static ScenarioSettings EffectiveSettings(ScenarioSettings s,
                                            const RunOverrides& o) {
    if (o.seed) s.seed = *o.seed;
    if (o.epoch_ms) s.epoch_ms = *o.epoch_ms;
    if (o.token_policy) s.token_policy = *o.token_policy;
    if (o.mac_randomization) s.mac_randomization = *o.mac_randomization;
    if (o.drop_radio) s.drop_radio = *o.drop_radio;
    if (o.drop_network) s.drop_network = *o.drop_network;
    return s;
  }

  // Builds devices, phones and the server. Parse-class failures only.
  absl::Status Build();
  absl::Status StartServer();
  absl::Status Execute(const Step& step);
  std::string Summary(const RunResult& result) const;

  PhoneActor& phone(const std::string& name) { return phones_.at(name); }
  Finder& finder(const std::string& name) { return *finders_.at(name); }
  absl::StatusOr<GeoLocation> Geo(const std::string& lat,
                                  const std::string& lon) const {
    return GeoLocation::FromDegrees(lat, lon);
  }
  absl::StatusOr<int64_t> Duration(const std::string& text) const {
    return ParseDuration(text, settings_.epoch_ms, /*allow_negative=*/true);
  }

  const Scenario& scenario_;
  const RunOverrides& overrides_;
  ScenarioSettings settings_;
  Simulation sim_;

  ManufacturerRegistry registry_;
  std::map<std::string, std::unique_ptr<Finder>> finders_;
  std::map<std::string, PhoneActor> phones_;
  std::unique_ptr<Server> server_;
  int server_generation_ = 0;
  std::string log_path_;
  std::string temp_log_;

  std::map<std::string, std::string> export_slots_;
  std::map<std::string, size_t> last_patrol_;
  std::vector<OwnerReportLine> reports_;
};

absl::Status Runner::Build() {
  if (!overrides_.registry_path.empty()) {
    auto loaded = ManufacturerRegistry::Load(overrides_.registry_path);
    if (!loaded.ok()) return MakeError(ErrorKind::kParseError,
                                       std::string(loaded.status().message()));
    registry_ = *std::move(loaded);
  }

  DeterministicRandom factory(settings_.seed, "factory");
  FinderConfig finder_config;
  finder_config.epoch_ms = settings_.epoch_ms;
  finder_config.mac_randomization = settings_.mac_randomization;

  DeterministicRandom phone_addresses(settings_.seed, "phone-addresses");
  for (const ActorDecl& actor : scenario_.actors) {
    if (actor.role == ActorDecl::Role::kPhone) {
      LinkAddress address;
      phone_addresses.Fill(address.bytes);
      address.bytes[0] = (address.bytes[0] | 0x02) & 0xFE;
      PhoneActor p;
      p.phone = std::make_unique<Phone>(actor.name, address);
      p.rng = std::make_unique<DeterministicRandom>(settings_.seed,
                                                    "owner/" + actor.name);
      OwnerOptions options;
      options.server = kServerName;
      options.epoch_ms = settings_.epoch_ms;
      options.mac_randomization = settings_.mac_randomization;
      p.owner = std::make_unique<OwnerApp>(*p.phone, sim_, *p.rng, options);
      p.reporter = std::make_unique<ReporterApp>(
          *p.phone, sim_, ReporterOptions{.server = kServerName});
      OwnerApp* owner = p.owner.get();
      p.reporter->set_own_finders(
          [owner] { return owner->KnownFinderAddresses(); });
      if (absl::Status s = sim_.AddPhone(actor.name, address, p.phone.get());
          !s.ok()) {
        return s;
      }
      phones_.emplace(actor.name, std::move(p));
      continue;
    }

    ProvisioningRecord record;
    switch (actor.kind) {
      case FinderKind::kGenuine:
        record = Finder::Manufacture(factory);
        registry_.Add(record.id_init, *record.mf_key);
        break;
      case FinderKind::kCounterfeit:
        record = Finder::Manufacture(factory);
        // The registry knows this id_init under a different key.
        registry_.Add(record.id_init, RandomFixed<SecretKey>(factory));
        break;
      case FinderKind::kUnregistered:
        record = Finder::Manufacture(factory);
        break;
      case FinderKind::kLegacy:
        record = Finder::Manufacture(factory, /*with_mf_key=*/false);
        break;
      case FinderKind::kProvisioned: {
        fs::path path(actor.provision_path);
        if (path.is_relative() && !overrides_.base_dir.empty()) {
          path = fs::path(overrides_.base_dir) / path;
        }
        auto loaded = LoadProvisioning(path.string());
        if (!loaded.ok()) return loaded.status();
        record = *std::move(loaded);
        break;
      }
    }
    auto device = std::make_unique<Finder>(
        record, finder_config,
        std::make_unique<DeterministicRandom>(settings_.seed,
                                              "finder/" + actor.name));
    if (absl::Status s = sim_.AddFinder(actor.name, device.get()); !s.ok()) {
      return s;
    }
    finders_.emplace(actor.name, std::move(device));
  }

  bool restarts = false;
  for (const Step& step : scenario_.steps) {
    restarts |= step.verb == "restart_server" ||
                (step.verb == "expect_error" && step.args.size() > 1 &&
                 step.args[1] == "restart_server");
  }
  if (!overrides_.state_dir.empty()) {
    std::error_code ec;
    fs::create_directories(overrides_.state_dir, ec);
    log_path_ = (fs::path(overrides_.state_dir) / "server.log").string();
    fs::remove(log_path_, ec);
  } else if (restarts) {
    SystemRandom entropy;
    std::array<uint8_t, 8> tag{};
    entropy.Fill(tag);
    temp_log_ = (fs::temp_directory_path() /
                 ("privatefind-" + HexEncode(tag) + ".log"))
                    .string();
    log_path_ = temp_log_;
  }
  if (absl::Status s = StartServer(); !s.ok()) return s;

  sim_.SetDropProbability(Channel::kRadio, settings_.drop_radio);
  sim_.SetDropProbability(Channel::kNetwork, settings_.drop_network);
  return absl::OkStatus();
}

absl::Status Runner::StartServer() {
  ServerConfig config;
  config.epoch_ms = settings_.epoch_ms;
  config.token_policy = settings_.token_policy;
  config.log_path = log_path_;
  auto server = Server::Create(
      config, registry_,
      std::make_unique<DeterministicRandom>(
          settings_.seed, "server/" + std::to_string(server_generation_)));
  if (!server.ok()) return server.status();
  ++server_generation_;
  absl::Status registered =
      server_ == nullptr ? sim_.AddNetworkEndpoint(kServerName, server->get())
                         : sim_.ReplaceNode(kServerName, server->get());
  if (!registered.ok()) return registered;
  server_ = *std::move(server);
  return absl::OkStatus();
}

absl::Status Runner::Execute(const Step& step) {
  const std::string& verb = step.verb;
  const auto& a = step.args;

  if (verb == "expect_error") {
    const ErrorKind want = ErrorKindFromName(a[0]);
    Step inner{step.line, a[1], std::vector<std::string>(a.begin() + 2, a.end())};
    absl::Status got = Execute(inner);
    if (got.ok()) {
      return StepError("expected " + a[0] + " but the step succeeded");
    }
    if (KindOf(got) != want) {
      return StepError("expected " + a[0] + " but got " +
                       std::string(got.message()));
    }
    return absl::OkStatus();
  }
  if (verb == "move") {
    return sim_.SetRange(a[0], std::set<std::string>(a.begin() + 1, a.end()));
  }
  if (verb == "press_button") {
    finder(a[0]).PressButtonHold(sim_.now_ms());
    return absl::OkStatus();
  }
  if (verb == "setup_local") {
    return phone(a[0])
        .owner
        ->SetupLocal(a[1], finder(a[1]).link_address(), a.size() > 2)
        .status();
  }
  if (verb == "setup_verified") {
    return phone(a[0])
        .owner->SetupVerified(a[1], finder(a[1]).link_address())
        .status();
  }
  if (verb == "advance") {
    auto d = Duration(a[0]);
    if (!d.ok()) return d.status();
    return sim_.AdvanceTime(*d);
  }
  if (verb == "skew") {
    auto d = Duration(a[1]);
    if (!d.ok()) return d.status();
    finder(a[0]).ApplyClockSkew(*d, sim_.now_ms());
    return absl::OkStatus();
  }
  if (verb == "patrol") {
    auto geo = Geo(a[1], a[2]);
    if (!geo.ok()) return geo.status();
    PhoneActor& p = phone(a[0]);
    std::vector<LocationReport> found = p.reporter->Patrol(*geo);
    last_patrol_[a[0]] = found.size();
    p.pending.insert(p.pending.end(), found.begin(), found.end());
    return absl::OkStatus();
  }
  if (verb == "submit") {
    PhoneActor& p = phone(a[0]);
    std::vector<LocationReport> batch = std::move(p.pending);
    p.pending.clear();
    absl::Status s = p.reporter->Submit(batch);
    if (!s.ok()) {
      // Keep the batch for a later retry.
      p.pending = std::move(batch);
      return s;
    }
    p.submitted.insert(p.submitted.end(), batch.begin(), batch.end());
    return absl::OkStatus();
  }
  if (verb == "replay") {
    PhoneActor& p = phone(a[0]);
    if (p.submitted.empty()) return StepError("nothing submitted to replay");
    return p.reporter->Submit(p.submitted);
  }
  if (verb == "fetch") {
    auto fetched = phone(a[0]).owner->FetchAndDecrypt(a[1]);
    if (!fetched.ok()) return fetched.status();
    for (const VerifiedReport& r : *fetched) {
      reports_.push_back(OwnerReportLine{a[0], a[1], r});
    }
    return absl::OkStatus();
  }
  if (verb == "mark_lost") return phone(a[0]).owner->MarkLost(a[1]);
  if (verb == "clear_lost") return phone(a[0]).owner->ClearLost(a[1]);
  if (verb == "set_opt_out") {
    return phone(a[0]).owner->SetOptOut(a[1], a[2] == "on");
  }
  if (verb == "export") {
    auto blob = phone(a[0]).owner->ExportIdentity(a[1]);
    if (!blob.ok()) return blob.status();
    export_slots_[a[2]] = *std::move(blob);
    return absl::OkStatus();
  }
  if (verb == "import") {
    auto slot = export_slots_.find(a[1]);
    if (slot == export_slots_.end()) {
      return StepError("export slot " + a[1] + " is empty");
    }
    return phone(a[0]).owner->ImportIdentity(a[2], slot->second).status();
  }
  if (verb == "request_token") {
    return phone(a[0]).owner->RequestToken(a[1]).status();
  }
  if (verb == "restart_server") {
    if (log_path_.empty()) return StepError("server has no log to replay");
    return StartServer();
  }
  if (verb == "expect_patrol") {
    const size_t want = std::stoul(a[1]);
    const size_t got = last_patrol_.contains(a[0]) ? last_patrol_[a[0]] : 0;
    if (got != want) {
      return StepError("expected " + std::to_string(want) +
                       " patrol replies, got " + std::to_string(got));
    }
    return absl::OkStatus();
  }
  if (verb == "expect_reports" || verb == "expect_location") {
    const OwnerRecord* record = phone(a[0]).owner->record(a[1]);
    if (record == nullptr) return StepError("no owner record for " + a[1]);
    if (verb == "expect_reports") {
      const size_t want = std::stoul(a[2]);
      if (record->accepted.size() != want) {
        return StepError("expected " + std::to_string(want) +
                         " reports, have " +
                         std::to_string(record->accepted.size()));
      }
      return absl::OkStatus();
    }
    auto geo = Geo(a[2], a[3]);
    if (!geo.ok()) return geo.status();
    if (!record->last_known_location ||
        record->last_known_location->geo != *geo) {
      return StepError("last known location differs");
    }
    return absl::OkStatus();
  }
  return StepError("unhandled step " + verb);
}

std::string Runner::Summary(const RunResult& result) const {
  std::ostringstream out;
  out << "scenario " << scenario_.name << " seed=" << settings_.seed
      << " epoch_ms=" << settings_.epoch_ms
      << " token_policy=" << TokenPolicyName(settings_.token_policy)
      << " mac_randomization=" << (settings_.mac_randomization ? "on" : "off")
      << "\n";
  out << "steps total=" << scenario_.steps.size() << "\n";
  for (const OwnerReportLine& line : result.reports) {
    const VerifiedReport& r = line.report;
    out << "report owner=" << line.phone << " finder=" << line.finder
        << " counter=" << r.counter << " lat_e7=" << r.geo.lat_e7
        << " lon_e7=" << r.geo.lon_e7 << " received_at_ms=" << r.received_at_ms
        << " anonymous=" << (r.anonymous ? "true" : "false") << "\n";
  }
  for (const auto& [name, p] : phones_) {
    for (const auto& [label, record] : p.owner->records()) {
      out << "owner " << name << " finder=" << label
          << " accepted=" << record.accepted.size()
          << " last_counter=" << record.last_counter_seen;
      if (record.last_known_location) {
        out << " last_location="
            << GeoLocation::FormatDegreesE7(
                   record.last_known_location->geo.lat_e7)
            << ","
            << GeoLocation::FormatDegreesE7(
                   record.last_known_location->geo.lon_e7);
      }
      out << "\n";
    }
  }
  size_t radio = 0, dropped = 0;
  for (const Envelope& env : result.transcript.envelopes()) {
    radio += env.channel == Channel::kRadio;
    dropped += env.dropped;
  }
  out << "transcript envelopes=" << result.transcript.size()
      << " radio=" << radio << " network=" << result.transcript.size() - radio
      << " dropped=" << dropped << "\n";
  out << result.audit.SummaryLine() << "\n";
  if (result.failure.ok()) {
    out << "result ok\n";
  } else {
    out << "result fail line=" << result.failed_line << " step=\""
        << result.failed_step << "\" error=\"" << result.failure.message()
        << "\"\n";
  }
  return out.str();
}

RunResult Runner::Run() {
  RunResult result;
  result.settings = settings_;

  if (absl::Status built = Build(); !built.ok()) {
    result.failure = built;
    result.exit_code = KindOf(built) == ErrorKind::kParseError
                           ? kExitParseError
                           : kExitScenarioFailure;
    result.summary = "result fail setup error=\"" +
                     std::string(built.message()) + "\"\n";
    return result;
  }

  for (const Step& step : scenario_.steps) {
    absl::Status s = Execute(step);
    if (!s.ok()) {
      result.failure = s;
      result.failed_line = step.line;
      result.failed_step = step.ToString();
      break;
    }
  }

  result.transcript = sim_.transcript();
  result.reports = reports_;
  result.last_patrol = last_patrol_;

  AuditSpec spec;
  spec.locations = scenario_.locations;
  spec.token_policy = settings_.token_policy;
  for (const auto& [name, p] : phones_) {
    for (const auto& [label, record] : p.owner->records()) {
      spec.secrets.emplace_back(record.e2e_key.span().begin(),
                                record.e2e_key.span().end());
    }
  }
  for (const auto& [name, device] : finders_) {
    if (const auto& key = device->state().mf_key) {
      spec.secrets.emplace_back(key->span().begin(), key->span().end());
    }
  }
  std::vector<Bytes> persisted;
  if (!log_path_.empty()) {
    const std::string log = ReadFileOrEmpty(log_path_);
    persisted.emplace_back(log.begin(), log.end());
  }
  result.audit = AuditTranscript(result.transcript, spec, persisted);

  if (!result.audit.pass()) {
    result.exit_code = kExitAuditFailure;
  } else if (!result.failure.ok()) {
    result.exit_code = kExitScenarioFailure;
  }
  result.summary = Summary(result);
  return result;
}

}  // namespace

RunResult RunScenario(const Scenario& scenario, const RunOverrides& overrides) {
  Runner runner(scenario, overrides);
  return runner.Run();
}

absl::Status WriteRunArtifacts(const RunResult& result,
                               const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) return absl::UnavailableError("cannot create " + out_dir);
  if (absl::Status s = result.transcript.WriteJsonLines(
          (fs::path(out_dir) / "transcript.jsonl").string());
      !s.ok()) {
    return s;
  }
  std::ofstream summary(fs::path(out_dir) / "summary.txt",
                        std::ios::binary | std::ios::trunc);
  summary << result.summary;
  if (!summary) return absl::UnavailableError("cannot write summary");
  return absl::OkStatus();
}

}  // namespace privatefind
