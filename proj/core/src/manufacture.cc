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

#include "privatefind/manufacture.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "privatefind/errors.h"

namespace privatefind {

using Json = nlohmann::ordered_json;

ManufactureBatch Manufacture(size_t count, RandomSource& rng) {
  ManufactureBatch batch;
  batch.finders.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    ProvisioningRecord record = Finder::Manufacture(rng);
    batch.registry.Add(record.id_init, *record.mf_key);
    batch.finders.push_back(std::move(record));
  }
  return batch;
}

std::string ProvisioningToJson(const ProvisioningRecord& record) {
  Json j;
  j["id_init"] = HexEncode(record.id_init.span());
  if (record.mf_key) j["mf_key"] = HexEncode(record.mf_key->span());
  j["address"] = record.address.ToString();
  return j.dump();
}

absl::StatusOr<ProvisioningRecord> ProvisioningFromJson(std::string_view text) {
  Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  auto fail = [](std::string_view what) {
    return MakeError(ErrorKind::kParseError,
                     "provisioning record: " + std::string(what));
  };
  if (j.is_discarded() || !j.is_object()) return fail("not a JSON object");
  if (!j.contains("id_init") || !j["id_init"].is_string() ||
      !j.contains("address") || !j["address"].is_string()) {
    return fail("id_init and address are required");
  }
  ProvisioningRecord record;
  auto id_bytes = HexDecode(j["id_init"].get<std::string>());
  if (!id_bytes.ok()) return fail("id_init is not hex");
  auto id = Identifier::FromSpan(*id_bytes);
  if (!id.ok()) return fail("id_init must be 32 bytes");
  record.id_init = *id;
  if (j.contains("mf_key")) {
    if (!j["mf_key"].is_string()) return fail("mf_key must be a string");
    auto key_bytes = HexDecode(j["mf_key"].get<std::string>());
    if (!key_bytes.ok()) return fail("mf_key is not hex");
    auto key = SecretKey::FromSpan(*key_bytes);
    if (!key.ok()) return fail("mf_key must be 32 bytes");
    record.mf_key = *key;
  }
  auto address = LinkAddress::Parse(j["address"].get<std::string>());
  if (!address.ok()) return fail("bad address");
  record.address = *address;
  return record;
}

absl::StatusOr<ProvisioningRecord> LoadProvisioning(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return MakeError(ErrorKind::kParseError, "cannot read " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ProvisioningFromJson(buffer.str());
}

absl::StatusOr<std::vector<std::string>> WriteManufactureBatch(
    const ManufactureBatch& batch, const std::string& registry_path,
    const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) return absl::UnavailableError("cannot create " + out_dir);
  if (auto parent = std::filesystem::path(registry_path).parent_path();
      !parent.empty()) {
    std::filesystem::create_directories(parent, ec);
  }
  if (absl::Status s = batch.registry.Save(registry_path); !s.ok()) return s;

  std::vector<std::string> paths;
  for (size_t i = 0; i < batch.finders.size(); ++i) {
    const std::string path =
        (std::filesystem::path(out_dir) / ("finder-" + std::to_string(i) +
                                           ".json"))
            .string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << ProvisioningToJson(batch.finders[i]) << '\n';
    if (!out) return absl::UnavailableError("cannot write " + path);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace privatefind
