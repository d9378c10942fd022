#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace lowcoll::cli {

/// Streaming FNV-1a (64-bit) over inputs and options.
class Digest {
 public:
  Digest& update(std::string_view bytes);
  /// Adds "name=value\n".
  Digest& option(std::string_view name, std::string_view value);
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::string tool_version;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;  // file names relative to the manifest
};

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& doc);
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace lowcoll::cli
