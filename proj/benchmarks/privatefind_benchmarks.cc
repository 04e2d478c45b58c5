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

#include <cstdint>
#include <string>

#include "benchmark/benchmark.h"
#include "privatefind/crypto.h"
#include "privatefind/identity_export.h"
#include "privatefind/radio_protocol.h"
#include "privatefind/random.h"
#include "privatefind/scenario.h"
#include "privatefind/scenario_runner.h"

namespace privatefind {
namespace {

void BM_RatchetAt(benchmark::State& state) {
  const auto key = SecretKey::Filled(1);
  const auto id = Identifier::Filled(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(RatchetAt(key, id, state.range(0)));
  }
  state.SetItemsProcessed(state.iterations() * (state.range(0) + 1));
}
BENCHMARK(BM_RatchetAt)->Arg(1)->Arg(96)->Arg(1000);

void BM_SealReport(benchmark::State& state) {
  DeterministicRandom rng(1, "bench");
  const auto key = SecretKey::Filled(1);
  const Bytes plaintext = radio::EncodeReportPlaintext(GeoLocation{}, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Seal(key, plaintext, rng));
  }
}
BENCHMARK(BM_SealReport);

void BM_OpenReport(benchmark::State& state) {
  DeterministicRandom rng(1, "bench");
  const auto key = SecretKey::Filled(1);
  const SealedBox box =
      Seal(key, radio::EncodeReportPlaintext(GeoLocation{}, 1), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Open(key, box));
  }
}
BENCHMARK(BM_OpenReport);

void BM_IdentityExportImport(benchmark::State& state) {
  OwnerRecord record;
  record.id_init = Identifier::Filled(2);
  record.e2e_key = SecretKey::Filled(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ImportIdentityText(ExportIdentityText(record)));
  }
}
BENCHMARK(BM_IdentityExportImport);

void BM_LostAndFoundScenario(benchmark::State& state) {
  auto scenario = LoadScenario(std::string(PRIVATEFIND_SCENARIO_DIR) +
                               "/lost-and-found.pfs");
  if (!scenario.ok()) {
    state.SkipWithError("cannot load scenario");
    return;
  }
  for (auto _ : state) {
    RunResult result = RunScenario(*scenario);
    if (result.exit_code != kExitOk) state.SkipWithError("scenario failed");
    benchmark::DoNotOptimize(result.transcript.size());
  }
}
BENCHMARK(BM_LostAndFoundScenario)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace privatefind

BENCHMARK_MAIN();
