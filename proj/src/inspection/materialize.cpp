#include "graphy/inspection/materialize.hpp"

#include "graphy/error.hpp"
#include "graphy/navigation/title.hpp"
#include "graphy/text.hpp"

namespace graphy::inspection {

using graph::LabelSchema;
using graph::NodeKind;
using graph::ValueType;

void declare_workflow_schema(graph::GraphStore& store, const WorkflowSpec& spec) {
  LabelSchema fact(NodeKind::fact);
  fact.add("title", ValueType::text, true);
  fact.add("doc_id", ValueType::text);
  for (const auto& f : spec.fact_attributes) {
    if (f.name != "title" && f.name != "doc_id") fact.add(f.name, f.type);
  }
  for (const auto& node : spec.nodes) {
    if (node.produces_dimensions()) continue;
    for (const auto& f : node.output_schema.fields) {
      if (f.name == "title" || f.name == "doc_id") continue;
      fact.add(f.name, f.type);
    }
  }
  store.declare_label(spec.fact_label, fact);
  for (const auto& node : spec.nodes) {
    if (!node.produces_dimensions()) continue;
    LabelSchema dim(NodeKind::dimension);
    for (const auto& f : node.output_schema.fields) {
      dim.add(f.name, f.type, node.output_schema.required.count(f.name) > 0);
    }
    store.declare_label(node.label, dim);
  }
}

std::string infer_title(const InspectionOutput& output) {
  if (auto it = output.fact_properties.find("title"); it != output.fact_properties.end()) {
    if (const auto* s = std::get_if<std::string>(&it->second); s && !text::trim(*s).empty()) return text::trim(*s);
  }
  if (auto it = output.metadata.find("title"); it != output.metadata.end() && !text::trim(it->second).empty()) {
    return text::trim(it->second);
  }
  std::string line = text::trim(output.first_line);
  if (line.size() > 300) line.resize(300);
  if (line.empty()) fail(ErrorCode::EmptyTitle, "document " + output.doc_id + " has no title");
  return line;
}

Materialized materialize(graph::GraphStore& store, const WorkflowSpec& spec, const InspectionOutput& output,
                         const std::string& title_override) {
  Materialized m;
  m.title = title_override.empty() ? infer_title(output) : title_override;
  m.fact = navigation::canonical_id(m.title);
  graph::Properties props;
  for (const auto& f : spec.fact_attributes) {
    auto it = output.metadata.find(f.name);
    if (it == output.metadata.end()) continue;
    OutputSchema one;
    one.fields = {f};
    nlohmann::json raw = nlohmann::json::parse(it->second, nullptr, false);
    if (f.type == ValueType::text || raw.is_discarded() || raw.is_object() || raw.is_array()) raw = it->second;
    try {
      auto typed = to_properties(validate_output(nlohmann::json{{f.name, raw}}, one), one);
      props.insert(typed.begin(), typed.end());
    } catch (const Error&) {
      // metadata that does not fit the declared type is left out
    }
  }
  for (const auto& [k, v] : output.fact_properties) props[k] = v;
  props["title"] = m.title;
  props["doc_id"] = output.doc_id;
  store.upsert_fact(m.fact, spec.fact_label, props);
  for (const auto& node : spec.nodes) {
    auto it = output.dimensions.find(node.name);
    if (it == output.dimensions.end() || it->second.empty()) continue;
    m.dimensions += store.add_dimensions(m.fact, node.label, it->second).size();
  }
  return m;
}

}  // namespace graphy::inspection
