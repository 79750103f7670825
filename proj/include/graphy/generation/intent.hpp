#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "graphy/graph/schema.hpp"
#include "graphy/providers/provider.hpp"

namespace graphy::generation {

/// Which model generation steps call. Without a registry or model id every
/// step uses its deterministic offline behavior.
struct GenerationModel {
  const providers::ProviderRegistry* providers = nullptr;
  std::string model_id;

  bool offline() const noexcept { return providers == nullptr || model_id.empty(); }
};

enum class ReportKind { related_work, survey, summary };

std::string_view to_string(ReportKind kind) noexcept;
std::optional<ReportKind> parse_report_kind(std::string_view name) noexcept;

struct ReportIntent {
  std::string instruction;
  std::vector<std::string> required_attributes;
  std::vector<std::string> required_dimensions;
  ReportKind report_kind = ReportKind::related_work;
  std::string fact_label = "Paper";
  bool from_fallback = false;  // true when the keyword fallback produced it

  friend bool operator==(const ReportIntent&, const ReportIntent&) = default;
};

/// Model proposal filtered to the schema vocabulary, or the keyword fallback
/// (dimension label stem in the instruction; "title" and "abstract" always)
/// when the model is unavailable or proposes no usable dimension.
/// Throws InvalidParams (empty instruction), NoUsableIntent.
ReportIntent interpret_intent(std::string_view instruction, const graph::GraphSchema& schema,
                              const std::string& fact_label, const GenerationModel& model);

/// The deterministic keyword fallback alone (may return no dimensions).
ReportIntent keyword_intent(std::string_view instruction, const graph::GraphSchema& schema,
                            const std::string& fact_label);

/// Checks a (possibly user-edited) intent against the schema. Throws
/// UnknownAttribute, UnknownLabel, NoUsableIntent (no dimension).
void validate_intent(const ReportIntent& intent, const graph::GraphSchema& schema);

nlohmann::json to_json(const ReportIntent& intent);
ReportIntent intent_from_json(const nlohmann::json& j);  // throws InvalidParams

}  // namespace graphy::generation
