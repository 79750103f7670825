#include "graphy/providers/provider.hpp"

#include "graphy/error.hpp"

namespace graphy::providers {

void ProviderRegistry::register_provider(std::string prefix, std::shared_ptr<const CompletionProvider> provider) {
  if (frozen_) fail(ErrorCode::InvalidParams, "provider registry is frozen");
  if (!provider) fail(ErrorCode::InvalidParams, "null provider");
  for (const auto& [p, _] : routes_) {
    if (p == prefix) fail(ErrorCode::DuplicatePrefix, "prefix already registered: \"" + prefix + "\"");
  }
  routes_.emplace_back(std::move(prefix), std::move(provider));
}

std::string ProviderRegistry::route_prefix(std::string_view model_id) const {
  const std::pair<std::string, std::shared_ptr<const CompletionProvider>>* best = nullptr;
  for (const auto& route : routes_) {
    if (model_id.substr(0, route.first.size()) != route.first) continue;
    if (!best || route.first.size() > best->first.size()) best = &route;
  }
  if (!best) fail(ErrorCode::NoProvider, "no provider for model " + std::string(model_id));
  return best->first;
}

const CompletionProvider& ProviderRegistry::route(std::string_view model_id) const {
  const auto prefix = route_prefix(model_id);
  for (const auto& [p, provider] : routes_) {
    if (p == prefix) return *provider;
  }
  fail(ErrorCode::NoProvider, "no provider for model " + std::string(model_id));
}

std::vector<std::string> ProviderRegistry::prefixes() const {
  std::vector<std::string> out;
  for (const auto& [p, _] : routes_) out.push_back(p);
  return out;
}

CompletionResult ProviderRegistry::complete(const CompletionRequest& request) const {
  if (request.model_id.empty()) fail(ErrorCode::InvalidParams, "model_id is empty");
  if (request.prompt.empty()) fail(ErrorCode::InvalidParams, "prompt is empty");
  const CompletionProvider& provider = route(request.model_id);

  auto attempt = [&](const CompletionRequest& req, std::string& problem) -> std::optional<CompletionResult> {
    CompletionResult result = provider.complete(req);
    if (result.provider_id.empty()) result.provider_id = provider.id();
    if (result.raw_text.empty()) fail(ErrorCode::ProviderFailure, provider.id() + " returned an empty response");
    if (!req.output_schema) return result;
    nlohmann::json raw = inspection::parse_json_from_text(result.raw_text);
    if (raw.is_discarded()) {
      problem = "the response was not valid JSON";
      return std::nullopt;
    }
    try {
      result.parsed = inspection::validate_output(raw, *req.output_schema);
    } catch (const Error& e) {
      problem = std::string(to_string(e.code())) + ": " + e.what();
      return std::nullopt;
    }
    return result;
  };

  std::string problem;
  CompletionRequest first = request;
  first.attempt = 0;
  if (auto ok = attempt(first, problem)) return *ok;

  CompletionRequest repair = request;
  repair.attempt = 1;
  repair.prompt = request.prompt + "\n\nYour previous answer was rejected (" + problem +
                  "). Reply with JSON only, matching exactly this JSON Schema:\n" +
                  inspection::describe(*request.output_schema).dump();
  if (auto ok = attempt(repair, problem)) return *ok;
  fail(ErrorCode::ParseFailure, "output did not match the schema after one repair: " + problem);
}

}  // namespace graphy::providers
