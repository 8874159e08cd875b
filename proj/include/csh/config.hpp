#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "csh/dynamics.hpp"
#include "json.hpp"

namespace csh {

inline constexpr int kConfigVersion = 1;

// Schema violations, one entry per offending field path.
struct ConfigError : Error {
  explicit ConfigError(std::vector<std::string> issues);
  std::vector<std::string> issues;
};

nlohmann::ordered_json to_json(const RunConfig& cfg);
nlohmann::ordered_json to_json(const InitialDataSpec& spec);

// Missing keys take the versioned defaults of RunConfig; unknown keys and
// type mismatches are errors.  Range checks are left to validate().
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// Parse, then validate, reporting both kinds of issue as ConfigError.
RunConfig load_and_validate(const std::filesystem::path& path);

}  // namespace csh
