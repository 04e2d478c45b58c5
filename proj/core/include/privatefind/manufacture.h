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

#ifndef PRIVATEFIND_MANUFACTURE_H_
#define PRIVATEFIND_MANUFACTURE_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privatefind/finder.h"
#include "privatefind/random.h"
#include "privatefind/server.h"

namespace privatefind {

struct ManufactureBatch {
  std::vector<ProvisioningRecord> finders;
  ManufacturerRegistry registry;
};

// `count` fresh devices, each with its own mf_key, all listed in the
// registry.
ManufactureBatch Manufacture(size_t count, RandomSource& rng);

// {"id_init": hex, "mf_key": hex, "address": "aa:bb:.."}; mf_key may be
// absent for legacy devices.
std::string ProvisioningToJson(const ProvisioningRecord& record);
absl::StatusOr<ProvisioningRecord> ProvisioningFromJson(std::string_view text);
absl::StatusOr<ProvisioningRecord> LoadProvisioning(const std::string& path);

// Writes `registry_path` and <out_dir>/finder-<i>.json; returns the
// provisioning file paths.
absl::StatusOr<std::vector<std::string>> WriteManufactureBatch(
    const ManufactureBatch& batch, const std::string& registry_path,
    const std::string& out_dir);

}  // namespace privatefind

#endif  // PRIVATEFIND_MANUFACTURE_H_
