#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphy/inspection/output_schema.hpp"

namespace graphy::providers {

struct CompletionRequest {
  std::string model_id;
  std::string prompt;
  std::vector<std::string> context_chunks;
  std::optional<inspection::OutputSchema> output_schema;
  std::size_t max_output = 4000;
  // Routing and offline-provider hints.
  std::string instruction;  // the subnode query, without template text
  std::string doc_id;
  std::string task;  // subnode or generation step name
  int attempt = 0;   // 1 for the repair retry
};

struct CompletionResult {
  std::string raw_text;
  std::optional<nlohmann::json> parsed;
  std::string provider_id;
};

/// A completion backend. Implementations must tolerate concurrent calls.
class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string id() const = 0;
  /// Returns raw text; `parsed` is filled by the registry. Throws ProviderFailure.
  virtual CompletionResult complete(const CompletionRequest& request) const = 0;
};

/// Routes requests by longest model-id prefix and enforces output schemas.
class ProviderRegistry {
 public:
  /// Throws DuplicatePrefix, or InvalidParams after freeze().
  void register_provider(std::string prefix, std::shared_ptr<const CompletionProvider> provider);
  void freeze() noexcept { frozen_ = true; }
  bool frozen() const noexcept { return frozen_; }

  /// Longest registered prefix of model_id. Throws NoProvider.
  const CompletionProvider& route(std::string_view model_id) const;
  std::string route_prefix(std::string_view model_id) const;

  /// Routes, completes and validates against request.output_schema. An
  /// unparsable or invalid answer gets one repair retry restating the schema,
  /// then ParseFailure.
  CompletionResult complete(const CompletionRequest& request) const;

  std::vector<std::string> prefixes() const;

 private:
  std::vector<std::pair<std::string, std::shared_ptr<const CompletionProvider>>> routes_;
  bool frozen_ = false;
};

}  // namespace graphy::providers
