#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "graphy/navigation/expand.hpp"
#include "graphy/navigation/repository.hpp"

namespace graphy::shell {

enum class RepositoryKind { none, fixture, live };

struct RepositoryConfig {
  RepositoryKind kind = RepositoryKind::none;
  std::filesystem::path manifest;  // fixture
  navigation::LiveRepositoryConfig live;
};

struct AppConfig {
  std::filesystem::path data_dir = "data";
  std::filesystem::path workflow;
  nlohmann::json providers;  // inline {"routes": [...]}
  std::filesystem::path providers_base;  // resolves fixture paths inside `providers`
  RepositoryConfig repository;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t workers = 4;
  std::chrono::seconds session_idle{24 * 3600};
  std::string generation_model;  // empty: templated offline generation
  navigation::ExpansionBudget budget;
  std::size_t embedding_dimension = 64;
};

/// Parses a config object. Relative paths resolve against `base_dir`; a
/// string "providers" names a routes file. Throws ConfigError.
AppConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Throws ConfigError naming `file` when it is missing or malformed.
AppConfig load_config(const std::filesystem::path& file);

}  // namespace graphy::shell
