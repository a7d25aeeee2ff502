#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "defrost/network.hpp"

namespace defrost {

/// Raised for malformed or inconsistent configs; mapped to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kToolVersion = "defrost 0.1.0";

/// FNV-1a 64 over the canonical (key-sorted) JSON dump; hex string.
/// Stable under key reordering of the config file.
std::string config_hash(const nlohmann::json& config);

NetworkSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const NetworkSpec& spec);

TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json train_config_to_json(const TrainConfig& config);

/// Loads the config, checks its kind against the subcommand, runs the
/// experiment and writes artifacts plus manifest.json under out_dir.
/// Returns 0 on success, 1 on config errors, 2 on runtime errors
/// (diagnostics on stderr).
int run_experiment(const std::string& config_path, const std::string& out_dir, std::size_t jobs,
                   const std::string& expected_kind);

}  // namespace defrost
