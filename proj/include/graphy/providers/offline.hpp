#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>

#include "graphy/providers/provider.hpp"

namespace graphy::providers {

struct Script {
  std::string response;
  std::optional<std::string> repair_response;
  bool fail = false;
};

/// Canned answers keyed by (doc_id, task); doc_id "*" is a wildcard.
/// Fixture file: {"scripts":[{"doc_id","task","response","repair_response"?,"fail"?}]}.
/// Non-string responses are serialized JSON.
class ScriptedProvider final : public CompletionProvider {
 public:
  ScriptedProvider() = default;
  explicit ScriptedProvider(const nlohmann::json& fixtures);
  static ScriptedProvider from_file(const std::filesystem::path& file);

  void add(std::string doc_id, std::string task, Script script);

  std::string id() const override { return "scripted"; }
  CompletionResult complete(const CompletionRequest& request) const override;

 private:
  std::map<std::pair<std::string, std::string>, Script> scripts_;
};

/// Keyword-overlap summarizer: returns up to kMaxItems context sentences that
/// share at least one non-stopword stem with the instruction, ranked by the
/// number of shared stems, then by position.
class ExtractiveProvider final : public CompletionProvider {
 public:
  static constexpr std::size_t kMaxItems = 5;

  std::string id() const override { return "extractive"; }
  CompletionResult complete(const CompletionRequest& request) const override;

  static std::vector<std::string> select_sentences(const std::string& query,
                                                   const std::vector<std::string>& context);
};

}  // namespace graphy::providers
