#include "lowcoll/cli/manifest.hpp"

#include <cstdio>
#include <fstream>

#include "lowcoll/error.hpp"

namespace lowcoll::cli {

using json = nlohmann::json;

Digest& Digest::update(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

Digest& Digest::option(std::string_view name, std::string_view value) {
  return update(name).update("=").update(value).update("\n");
}

std::string Digest::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

json to_json(const RunManifest& manifest) {
  return {{"command", manifest.command},
          {"config_digest", manifest.config_digest},
          {"tool_version", manifest.tool_version},
          {"seed", manifest.seed ? json(*manifest.seed) : json(nullptr)},
          {"outputs", manifest.outputs}};
}

RunManifest manifest_from_json(const json& doc) {
  try {
    RunManifest manifest;
    manifest.command = doc.at("command").get<std::string>();
    manifest.config_digest = doc.at("config_digest").get<std::string>();
    manifest.tool_version = doc.at("tool_version").get<std::string>();
    if (!doc.at("seed").is_null()) manifest.seed = doc.at("seed").get<std::uint64_t>();
    manifest.outputs = doc.at("outputs").get<std::vector<std::string>>();
    return manifest;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << to_json(manifest).dump(2) << '\n';
}

}  // namespace lowcoll::cli
