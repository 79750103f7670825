#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "graphy/inspection/output_schema.hpp"

namespace graphy::inspection {

struct SectionRule {
  std::string section;  // heading text, e.g. "Abstract"
  std::string field;    // output key, defaults to the lowercased section
  friend bool operator==(const SectionRule&, const SectionRule&) = default;
};

struct PatternRule {
  std::string pattern;  // ECMAScript/Perl syntax; (?P<name>...) is accepted
  bool repeat = false;  // every match instead of the first
  friend bool operator==(const PatternRule&, const PatternRule&) = default;
};

using RuleSpec = std::variant<SectionRule, PatternRule>;

struct ModelSpec {
  std::string model_id;
  std::string query;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct InspectNodeSpec {
  std::string name;
  std::variant<RuleSpec, ModelSpec> extractor;
  OutputSchema output_schema;
  bool as_node = false;
  std::size_t retrieval_k = 5;
  std::string label;  // dimension label; defaults to the singular of name

  bool is_rule() const { return std::holds_alternative<RuleSpec>(extractor); }
  /// True when the output is stored as Dimension nodes.
  bool produces_dimensions() const { return output_schema.kind == OutputKind::array_typed || as_node; }
};

struct WorkflowSpec {
  std::string fact_label = "Paper";
  // Fact properties filled from document metadata (e.g. a repository's year).
  std::vector<OutputField> fact_attributes;
  std::vector<InspectNodeSpec> nodes;
  std::vector<std::pair<std::string, std::string>> edges;

  const InspectNodeSpec* find(std::string_view name) const;
  std::vector<std::string> predecessors(std::string_view name) const;
};

/// Accepts {"fact_label"?, "fact_attributes"?: {name: type}, "dag": {"nodes", "edges"}}
/// or a bare {"nodes","edges"}.
/// Throws MalformedConfig, DuplicateNodeName, UnknownEdgeEndpoint, CycleDetected.
WorkflowSpec parse_workflow_text(std::string_view config_text);
WorkflowSpec parse_workflow(const nlohmann::json& config);

/// Kahn's algorithm; among ready nodes the earliest declared runs first.
std::vector<std::string> topological_order(const WorkflowSpec& spec);

/// "Challenges" -> "Challenge", "Solutions" -> "Solution"; other names unchanged.
std::string default_dimension_label(std::string_view node_name);

}  // namespace graphy::inspection
