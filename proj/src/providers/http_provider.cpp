#include "graphy/providers/http_provider.hpp"

#include <cstdlib>

#include <httplib.h>

#include "graphy/error.hpp"

namespace graphy::providers {

using nlohmann::json;

bool offline_mode() {
  const char* v = std::getenv("GRAPHY_OFFLINE");
  return v && std::string_view(v) == "1";
}

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
  if (offline_mode()) fail(ErrorCode::ConfigError, "GRAPHY_OFFLINE=1 forbids the http provider");
  if (config_.endpoint.rfind("http://", 0) != 0 && config_.endpoint.rfind("https://", 0) != 0) {
    fail(ErrorCode::ConfigError, "http provider endpoint must start with http:// or https://");
  }
  while (!config_.endpoint.empty() && config_.endpoint.back() == '/') config_.endpoint.pop_back();
}

json HttpProvider::request_body(const CompletionRequest& request) const {
  std::string model = request.model_id;
  if (!config_.strip_prefix.empty() && model.rfind(config_.strip_prefix, 0) == 0) {
    model = model.substr(config_.strip_prefix.size());
  }
  std::string content = request.prompt;
  if (!request.context_chunks.empty()) {
    content += "\n\nContext:";
    for (const auto& c : request.context_chunks) content += "\n---\n" + c;
  }
  return {{"model", model},
          {"temperature", 0},
          {"max_tokens", std::max<std::size_t>(1, request.max_output / 4)},
          {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
}

CompletionResult HttpProvider::complete(const CompletionRequest& request) const {
  httplib::Client client(config_.endpoint);
  client.set_connection_timeout(config_.timeout_seconds);
  client.set_read_timeout(config_.timeout_seconds);
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  auto res = client.Post(config_.path, headers, request_body(request).dump(), "application/json");
  if (!res) fail(ErrorCode::ProviderFailure, "transport error: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    fail(ErrorCode::ProviderFailure, "provider returned HTTP " + std::to_string(res->status));
  }
  json body = json::parse(res->body, nullptr, false);
  if (body.is_discarded()) fail(ErrorCode::ProviderFailure, "provider returned non-JSON body");
  try {
    CompletionResult out;
    out.raw_text = body.at("choices").at(0).at("message").at("content").get<std::string>();
    out.provider_id = id();
    return out;
  } catch (const json::exception&) {
    fail(ErrorCode::ProviderFailure, "unexpected chat-completion response shape");
  }
}

}  // namespace graphy::providers
