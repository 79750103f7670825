#include "graphy/providers/config.hpp"

#include <fstream>

#include "graphy/error.hpp"
#include "graphy/providers/http_provider.hpp"
#include "graphy/providers/offline.hpp"

namespace graphy::providers {

using nlohmann::json;

std::shared_ptr<ProviderRegistry> load_providers(const json& config, const std::filesystem::path& base_dir) {
  if (!config.is_object() || !config.contains("routes") || !config["routes"].is_array()) {
    fail(ErrorCode::ConfigError, "provider config needs a \"routes\" array");
  }
  auto registry = std::make_shared<ProviderRegistry>();
  for (const auto& route : config["routes"]) {
    if (!route.is_object() || !route.contains("prefix") || !route["prefix"].is_string() ||
        !route.contains("type") || !route["type"].is_string()) {
      fail(ErrorCode::ConfigError, "each route needs string prefix and type");
    }
    const std::string type = route["type"].get<std::string>();
    std::shared_ptr<const CompletionProvider> provider;
    if (type == "scripted") {
      if (!route.contains("fixtures")) fail(ErrorCode::ConfigError, "scripted route needs fixtures");
      std::filesystem::path p = route["fixtures"].get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      provider = std::make_shared<ScriptedProvider>(ScriptedProvider::from_file(p));
    } else if (type == "extractive") {
      provider = std::make_shared<ExtractiveProvider>();
    } else if (type == "http") {
      HttpProviderConfig hc;
      hc.endpoint = route.value("endpoint", "");
      hc.path = route.value("path", hc.path);
      hc.api_key_env = route.value("api_key_env", "");
      hc.strip_prefix = route.value("strip_prefix", "");
      hc.timeout_seconds = route.value("timeout_seconds", hc.timeout_seconds);
      provider = std::make_shared<HttpProvider>(hc);
    } else {
      fail(ErrorCode::ConfigError, "unknown provider type " + type);
    }
    registry->register_provider(route["prefix"].get<std::string>(), std::move(provider));
  }
  registry->freeze();
  return registry;
}

std::shared_ptr<ProviderRegistry> load_providers_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::ConfigError, "cannot read provider config " + file.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::ConfigError, "provider config is not valid JSON");
  return load_providers(j, file.parent_path());
}

}  // namespace graphy::providers
