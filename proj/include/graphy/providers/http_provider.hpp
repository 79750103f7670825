#pragma once

#include <string>

#include "graphy/providers/provider.hpp"

namespace graphy::providers {

struct HttpProviderConfig {
  std::string endpoint;      // base URL, e.g. http://localhost:11434
  std::string path = "/v1/chat/completions";
  std::string api_key_env;   // name of the env var holding a bearer token
  std::string strip_prefix;  // removed from model_id before sending
  int timeout_seconds = 120;
};

/// OpenAI-compatible chat-completion client.
class HttpProvider final : public CompletionProvider {
 public:
  /// Throws ConfigError when GRAPHY_OFFLINE=1 or the endpoint is malformed.
  explicit HttpProvider(HttpProviderConfig config);

  std::string id() const override { return "http:" + config_.endpoint; }
  CompletionResult complete(const CompletionRequest& request) const override;

  /// Request body sent for `request` (exposed for tests).
  nlohmann::json request_body(const CompletionRequest& request) const;

 private:
  HttpProviderConfig config_;
};

bool offline_mode();

}  // namespace graphy::providers
