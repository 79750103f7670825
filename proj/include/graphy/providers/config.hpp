#pragma once

#include <filesystem>
#include <memory>

#include <json.hpp>

#include "graphy/providers/provider.hpp"

namespace graphy::providers {

/// Builds a frozen registry from {"routes":[{"prefix","type",...}]}.
/// Types: scripted {fixtures}, extractive, http {endpoint, path?, api_key_env?,
/// strip_prefix?, timeout_seconds?}. Relative fixture paths resolve against
/// `base_dir`. Throws ConfigError or DuplicatePrefix.
std::shared_ptr<ProviderRegistry> load_providers(const nlohmann::json& config,
                                                 const std::filesystem::path& base_dir = {});

std::shared_ptr<ProviderRegistry> load_providers_file(const std::filesystem::path& file);

}  // namespace graphy::providers
