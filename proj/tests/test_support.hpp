#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "lowcoll/rng.hpp"

namespace lowcoll::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(LOWCOLL_FIXTURE_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lowcoll_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace lowcoll::testing
