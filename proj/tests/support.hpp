#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace smile::testing {

inline std::string test_data(const std::string& name) { return std::string(SMILE_TEST_DATA) + "/" + name; }
inline std::string repo_data(const std::string& name) { return std::string(SMILE_REPO_DATA) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json(const std::string& path) { return nlohmann::json::parse(slurp(path)); }

}  // namespace smile::testing
