#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"

namespace bhasha {

inline constexpr std::string_view kToolVersion = "0.3.0";

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// One per CLI invocation. Inputs and outputs are keyed by file name so two
// runs in different directories compare equal when their content does.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  nlohmann::json metrics = nlohmann::json::object();
  std::string started_at;
  std::string finished_at;
  std::string tool_version{kToolVersion};

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

std::string utc_timestamp();

}  // namespace bhasha
