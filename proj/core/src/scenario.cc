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

#include "privatefind/scenario.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "privatefind/errors.h"

namespace privatefind {

namespace {

enum class Arg {
  kPhone,
  kFinder,
  kDuration,
  kSignedDuration,
  kCount,
  kLat,
  kLon,
  kOnOff,
  kWord,
  kResetFlag,
};

struct VerbSpec {
  std::string_view verb;
  std::vector<Arg> required = {};
  std::vector<Arg> optional = {};
  // Trailing finders, e.g. `move`.
  bool variadic_finders = false;
};

const std::vector<VerbSpec>& Verbs() {
  static const std::vector<VerbSpec> kVerbs = {
      {"move", {Arg::kPhone}, {}, true},
      {"press_button", {Arg::kFinder}},
      {"setup_local", {Arg::kPhone, Arg::kFinder}, {Arg::kResetFlag}},
      {"setup_verified", {Arg::kPhone, Arg::kFinder}},
      {"advance", {Arg::kDuration}},
      {"skew", {Arg::kFinder, Arg::kSignedDuration}},
      {"patrol", {Arg::kPhone, Arg::kLat, Arg::kLon}},
      {"submit", {Arg::kPhone}},
      {"replay", {Arg::kPhone}},
      {"fetch", {Arg::kPhone, Arg::kFinder}},
      {"mark_lost", {Arg::kPhone, Arg::kFinder}},
      {"clear_lost", {Arg::kPhone, Arg::kFinder}},
      {"set_opt_out", {Arg::kPhone, Arg::kFinder, Arg::kOnOff}},
      {"export", {Arg::kPhone, Arg::kFinder, Arg::kWord}},
      {"import", {Arg::kPhone, Arg::kWord, Arg::kFinder}},
      {"request_token", {Arg::kPhone, Arg::kFinder}},
      {"restart_server", {}},
      {"expect_patrol", {Arg::kPhone, Arg::kCount}},
      {"expect_reports", {Arg::kPhone, Arg::kFinder, Arg::kCount}},
      {"expect_location",
       {Arg::kPhone, Arg::kFinder, Arg::kLat, Arg::kLon}},
  };
  return kVerbs;
}

const VerbSpec* FindVerb(std::string_view verb) {
  for (const VerbSpec& spec : Verbs()) {
    if (spec.verb == verb) return &spec;
  }
  return nullptr;
}

std::vector<std::string> Tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(line)};
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

template <typename T>
bool ParseNumber(std::string_view text, T& out) {
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

absl::Status LineError(int line, std::string_view what) {
  return MakeError(ErrorKind::kParseError,
                   "line " + std::to_string(line) + ": " + std::string(what));
}

absl::Status ParseSetting(const std::vector<std::string>& t,
                          ScenarioSettings& s, int line) {
  const std::string& key = t[0];
  if (key == "drop_prob") {
    double p = 0;
    if (t.size() != 3 || !ParseNumber(t[2], p) || p < 0.0 || p > 1.0) {
      return LineError(line, "usage: drop_prob radio|network <0..1>");
    }
    if (t[1] == "radio") {
      s.drop_radio = p;
    } else if (t[1] == "network") {
      s.drop_network = p;
    } else {
      return LineError(line, "drop_prob channel must be radio or network");
    }
    return absl::OkStatus();
  }
  if (t.size() != 2) return LineError(line, key + " takes one value");
  if (key == "seed") {
    if (!ParseNumber(t[1], s.seed)) return LineError(line, "bad seed");
  } else if (key == "epoch_ms") {
    if (!ParseNumber(t[1], s.epoch_ms) || s.epoch_ms <= 0) {
      return LineError(line, "epoch_ms must be a positive integer");
    }
  } else if (key == "mac_randomization") {
    if (t[1] != "on" && t[1] != "off") {
      return LineError(line, "mac_randomization takes on|off");
    }
    s.mac_randomization = t[1] == "on";
  } else if (key == "token_policy") {
    auto policy = ParseTokenPolicy(t[1]);
    if (!policy.ok()) return LineError(line, std::string(policy.status().message()));
    s.token_policy = *policy;
  }
  return absl::OkStatus();
}

absl::StatusOr<ActorDecl> ParseActor(const std::vector<std::string>& t,
                                     int line) {
  ActorDecl actor;
  actor.line = line;
  actor.role = t[0] == "phone" ? ActorDecl::Role::kPhone
                               : ActorDecl::Role::kFinder;
  if (t.size() < 2) return LineError(line, t[0] + " needs a name");
  actor.name = t[1];
  if (actor.role == ActorDecl::Role::kPhone) {
    if (t.size() != 2) return LineError(line, "usage: phone <name>");
    return actor;
  }
  if (t.size() > 3) return LineError(line, "usage: finder <name> [kind]");
  if (t.size() == 3) {
    const std::string& kind = t[2];
    if (kind == "genuine") {
      actor.kind = FinderKind::kGenuine;
    } else if (kind == "counterfeit") {
      actor.kind = FinderKind::kCounterfeit;
    } else if (kind == "unregistered") {
      actor.kind = FinderKind::kUnregistered;
    } else if (kind == "legacy") {
      actor.kind = FinderKind::kLegacy;
    } else if (kind.starts_with("provision=") &&
               kind.size() > std::string_view("provision=").size()) {
      actor.kind = FinderKind::kProvisioned;
      actor.provision_path = kind.substr(kind.find('=') + 1);
    } else {
      return LineError(line, "unknown finder kind " + kind);
    }
  }
  return actor;
}

bool IsSetting(std::string_view word) {
  return word == "seed" || word == "epoch_ms" || word == "mac_randomization" ||
         word == "token_policy" || word == "drop_prob";
}

// Checks arity, actor references and literal syntax of one step.
absl::Status ValidateStep(const Scenario& scenario, const Step& step) {
  if (step.verb == "expect_error") {
    if (step.args.size() < 2) {
      return LineError(step.line, "usage: expect_error <Kind> <step...>");
    }
    if (ErrorKindFromName(step.args[0]) == ErrorKind::kOther ||
        ErrorKindFromName(step.args[0]) == ErrorKind::kNone) {
      return LineError(step.line, "unknown error kind " + step.args[0]);
    }
    Step inner{step.line, step.args[1],
               std::vector<std::string>(step.args.begin() + 2,
                                        step.args.end())};
    if (inner.verb == "expect_error") {
      return LineError(step.line, "expect_error cannot nest");
    }
    return ValidateStep(scenario, inner);
  }

  const VerbSpec* spec = FindVerb(step.verb);
  if (spec == nullptr) return LineError(step.line, "unknown step " + step.verb);
  const size_t min = spec->required.size();
  const size_t max = min + spec->optional.size();
  if (step.args.size() < min ||
      (!spec->variadic_finders && step.args.size() > max)) {
    return LineError(step.line, "wrong number of arguments for " + step.verb);
  }

  auto expect_actor = [&](const std::string& name, ActorDecl::Role role) {
    const ActorDecl* actor = scenario.FindActor(name);
    if (actor == nullptr || actor->role != role) {
      return LineError(step.line,
                       std::string(role == ActorDecl::Role::kPhone
                                       ? "unknown phone "
                                       : "unknown finder ") +
                           name);
    }
    return absl::OkStatus();
  };

  for (size_t i = 0; i < step.args.size(); ++i) {
    const std::string& a = step.args[i];
    Arg kind = Arg::kFinder;
    if (i < spec->required.size()) {
      kind = spec->required[i];
    } else if (i < max) {
      kind = spec->optional[i - min];
    }
    absl::Status s = absl::OkStatus();
    switch (kind) {
      case Arg::kPhone:
        s = expect_actor(a, ActorDecl::Role::kPhone);
        break;
      case Arg::kFinder:
        s = expect_actor(a, ActorDecl::Role::kFinder);
        break;
      case Arg::kDuration:
      case Arg::kSignedDuration: {
        auto d = ParseDuration(a, 1, kind == Arg::kSignedDuration);
        if (!d.ok()) s = LineError(step.line, std::string(d.status().message()));
        break;
      }
      case Arg::kCount: {
        uint32_t n = 0;
        if (!ParseNumber(a, n)) s = LineError(step.line, "bad count " + a);
        break;
      }
      case Arg::kLat:
      case Arg::kLon: {
        auto v = GeoLocation::ParseDegreesE7(a);
        if (!v.ok()) s = LineError(step.line, "bad coordinate " + a);
        break;
      }
      case Arg::kOnOff:
        if (a != "on" && a != "off") s = LineError(step.line, "expected on|off");
        break;
      case Arg::kWord:
        break;
      case Arg::kResetFlag:
        if (a != "reset_id") s = LineError(step.line, "expected reset_id");
        break;
    }
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

}  // namespace

std::string Step::ToString() const {
  std::string out = verb;
  for (const std::string& a : args) {
    out += ' ';
    out += a;
  }
  return out;
}

const ActorDecl* Scenario::FindActor(std::string_view name) const {
  for (const ActorDecl& actor : actors) {
    if (actor.name == name) return &actor;
  }
  return nullptr;
}

absl::StatusOr<int64_t> ParseDuration(std::string_view text, int64_t epoch_ms,
                                      bool allow_negative) {
  size_t unit_pos = text.find_first_not_of("+-0123456789");
  if (unit_pos == std::string_view::npos || unit_pos == 0) {
    return MakeError(ErrorKind::kParseError,
                     "duration needs a unit (ms|s|m|h|d|e): " +
                         std::string(text));
  }
  std::string_view digits = text.substr(0, unit_pos);
  if (digits.front() == '+') digits.remove_prefix(1);
  int64_t value = 0;
  if (!ParseNumber(digits, value)) {
    return MakeError(ErrorKind::kParseError,
                     "bad duration " + std::string(text));
  }
  if (value < 0 && !allow_negative) {
    return MakeError(ErrorKind::kParseError,
                     "negative duration " + std::string(text));
  }
  const std::string_view unit = text.substr(unit_pos);
  int64_t scale = 0;
  if (unit == "ms") {
    scale = 1;
  } else if (unit == "s") {
    scale = 1000;
  } else if (unit == "m") {
    scale = 60'000;
  } else if (unit == "h") {
    scale = 3'600'000;
  } else if (unit == "d") {
    scale = 86'400'000;
  } else if (unit == "e") {
    scale = epoch_ms;
  } else {
    return MakeError(ErrorKind::kParseError,
                     "unknown duration unit " + std::string(unit));
  }
  return value * scale;
}

absl::StatusOr<Scenario> ParseScenario(std::string_view text,
                                       std::string name) {
  Scenario scenario;
  scenario.name = std::move(name);

  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (size_t hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    std::vector<std::string> t = Tokenize(raw);
    if (t.empty()) continue;

    if (IsSetting(t[0])) {
      if (absl::Status s = ParseSetting(t, scenario.settings, line); !s.ok()) {
        return s;
      }
    } else if (t[0] == "phone" || t[0] == "finder") {
      auto actor = ParseActor(t, line);
      if (!actor.ok()) return actor.status();
      if (scenario.FindActor(actor->name) != nullptr ||
          actor->name == "server") {
        return LineError(line, "duplicate actor " + actor->name);
      }
      scenario.actors.push_back(*std::move(actor));
    } else {
      scenario.steps.push_back(
          Step{line, t[0], std::vector<std::string>(t.begin() + 1, t.end())});
    }
  }

  for (const Step& step : scenario.steps) {
    if (absl::Status s = ValidateStep(scenario, step); !s.ok()) return s;
    // Coordinates are syntactically valid by now.
    const Step* target = &step;
    Step inner;
    if (step.verb == "expect_error") {
      inner = Step{step.line, step.args[1],
                   std::vector<std::string>(step.args.begin() + 2,
                                            step.args.end())};
      target = &inner;
    }
    size_t lat_index = 0;
    if (target->verb == "patrol") lat_index = 1;
    if (target->verb == "expect_location") lat_index = 2;
    if (lat_index != 0) {
      auto geo = GeoLocation::FromDegrees(target->args[lat_index],
                                          target->args[lat_index + 1]);
      if (!geo.ok()) return LineError(step.line, std::string(geo.status().message()));
      if (std::find(scenario.locations.begin(), scenario.locations.end(),
                    *geo) == scenario.locations.end()) {
        scenario.locations.push_back(*geo);
      }
    }
  }
  return scenario;
}

absl::StatusOr<Scenario> LoadScenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return MakeError(ErrorKind::kParseError, "cannot read scenario " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseScenario(buffer.str(), std::filesystem::path(path).stem());
}

}  // namespace privatefind
