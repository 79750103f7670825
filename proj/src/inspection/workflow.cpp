#include "graphy/inspection/workflow.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "graphy/error.hpp"
#include "graphy/text.hpp"

namespace graphy::inspection {

using nlohmann::json;

const InspectNodeSpec* WorkflowSpec::find(std::string_view name) const {
  for (const auto& n : nodes) {
    if (n.name == name) return &n;
  }
  return nullptr;
}

std::vector<std::string> WorkflowSpec::predecessors(std::string_view name) const {
  std::vector<std::string> out;
  for (const auto& n : nodes) {
    for (const auto& [s, t] : edges) {
      if (t == name && s == n.name) {
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

std::string default_dimension_label(std::string_view name) {
  if (name.size() > 3 && name.back() == 's' && name[name.size() - 2] != 's') {
    return std::string(name.substr(0, name.size() - 1));
  }
  return std::string(name);
}

namespace {

std::string require_string(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty()) {
    fail(ErrorCode::MalformedConfig, where + ": \"" + key + "\" must be a non-empty string");
  }
  return j[key].get<std::string>();
}

RuleSpec parse_rule(const json& j, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::MalformedConfig, where + ": extract_from must be an object");
  const bool section = j.contains("section");
  const bool pattern = j.contains("pattern");
  if (section == pattern) {
    fail(ErrorCode::MalformedConfig, where + ": extract_from needs exactly one of section or pattern");
  }
  if (section) {
    SectionRule r{require_string(j, "section", where), ""};
    r.field = j.contains("field") ? require_string(j, "field", where) : text::to_lower(r.section);
    return r;
  }
  PatternRule r{require_string(j, "pattern", where), false};
  if (j.contains("repeat")) {
    if (!j["repeat"].is_boolean()) fail(ErrorCode::MalformedConfig, where + ": repeat must be boolean");
    r.repeat = j["repeat"].get<bool>();
  }
  return r;
}

InspectNodeSpec parse_node(const json& j, std::size_t position) {
  const std::string where = "dag.nodes[" + std::to_string(position) + "]";
  if (!j.is_object()) fail(ErrorCode::MalformedConfig, where + " must be an object");
  InspectNodeSpec node;
  node.name = require_string(j, "name", where);
  const bool rule = j.contains("extract_from");
  const bool model = j.contains("model");
  if (rule == model) {
    fail(ErrorCode::MalformedConfig, where + " (" + node.name + ") needs exactly one of extract_from or model");
  }
  if (rule) {
    node.extractor = parse_rule(j["extract_from"], where);
  } else {
    ModelSpec m;
    const json& mj = j["model"];
    if (mj.is_string()) {
      m.model_id = mj.get<std::string>();
    } else if (mj.is_object()) {
      m.model_id = require_string(mj, "name", where + ".model");
    } else {
      fail(ErrorCode::MalformedConfig, where + ": model must be a string or object");
    }
    if (m.model_id.empty()) fail(ErrorCode::MalformedConfig, where + ": empty model name");
    m.query = require_string(j, "query", where);
    node.extractor = m;
  }
  if (j.contains("output_schema")) {
    node.output_schema = parse_output_schema(j["output_schema"]);
  } else if (rule && std::holds_alternative<SectionRule>(std::get<RuleSpec>(node.extractor))) {
    const auto& s = std::get<SectionRule>(std::get<RuleSpec>(node.extractor));
    node.output_schema.kind = OutputKind::single_typed;
    node.output_schema.fields = {OutputField{s.field, graph::ValueType::text}};
    node.output_schema.required = {s.field};
  } else {
    fail(ErrorCode::MalformedConfig, where + " (" + node.name + ") needs an output_schema");
  }
  if (j.contains("as_node")) {
    if (!j["as_node"].is_boolean()) fail(ErrorCode::MalformedConfig, where + ": as_node must be boolean");
    node.as_node = j["as_node"].get<bool>();
  }
  if (j.contains("retrieval_k")) {
    if (!j["retrieval_k"].is_number_integer() || j["retrieval_k"].get<long long>() < 1) {
      fail(ErrorCode::MalformedConfig, where + ": retrieval_k must be a positive integer");
    }
    node.retrieval_k = j["retrieval_k"].get<std::size_t>();
  }
  node.label = j.contains("label") ? require_string(j, "label", where) : default_dimension_label(node.name);
  return node;
}

}  // namespace

WorkflowSpec parse_workflow_text(std::string_view config_text) {
  json j = json::parse(config_text.begin(), config_text.end(), nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::MalformedConfig, "workflow config is not valid JSON");
  return parse_workflow(j);
}

WorkflowSpec parse_workflow(const json& config) {
  if (!config.is_object()) fail(ErrorCode::MalformedConfig, "workflow config must be an object");
  WorkflowSpec spec;
  if (config.contains("fact_label")) spec.fact_label = require_string(config, "fact_label", "workflow");
  if (config.contains("fact_attributes")) {
    const json& attrs = config["fact_attributes"];
    if (!attrs.is_object()) fail(ErrorCode::MalformedConfig, "fact_attributes must be an object");
    for (const auto& [name, type] : attrs.items()) {
      auto t = type.is_string() ? graph::parse_value_type(type.get<std::string>()) : std::nullopt;
      if (!t || *t == graph::ValueType::text_list) fail(ErrorCode::MalformedConfig, "bad fact attribute type for " + name);
      spec.fact_attributes.push_back(OutputField{name, *t});
    }
  }
  const json& dag = config.contains("dag") ? config["dag"] : config;
  if (!dag.is_object()) fail(ErrorCode::MalformedConfig, "dag must be an object");
  const json nodes = dag.value("nodes", json::array());
  const json edges = dag.value("edges", json::array());
  if (!nodes.is_array() || !edges.is_array()) fail(ErrorCode::MalformedConfig, "dag.nodes and dag.edges must be arrays");

  std::set<std::string> names;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto node = parse_node(nodes[i], i);
    if (!names.insert(node.name).second) fail(ErrorCode::DuplicateNodeName, "duplicate node name " + node.name);
    spec.nodes.push_back(std::move(node));
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "dag.edges[" + std::to_string(i) + "]";
    if (!edges[i].is_object()) fail(ErrorCode::MalformedConfig, where + " must be an object");
    std::string s = require_string(edges[i], "source", where);
    std::string t = require_string(edges[i], "target", where);
    if (!names.count(s)) fail(ErrorCode::UnknownEdgeEndpoint, where + ": unknown source " + s);
    if (!names.count(t)) fail(ErrorCode::UnknownEdgeEndpoint, where + ": unknown target " + t);
    if (s == t) fail(ErrorCode::CycleDetected, "self-edge on " + s);
    if (seen.insert({s, t}).second) spec.edges.emplace_back(std::move(s), std::move(t));
  }
  if (topological_order(spec).size() != spec.nodes.size()) {
    fail(ErrorCode::CycleDetected, "workflow dag contains a cycle");
  }
  return spec;
}

std::vector<std::string> topological_order(const WorkflowSpec& spec) {
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) position[spec.nodes[i].name] = i;
  std::vector<std::size_t> indegree(spec.nodes.size(), 0);
  std::vector<std::vector<std::size_t>> out(spec.nodes.size());
  for (const auto& [s, t] : spec.edges) {
    auto si = position.find(s);
    auto ti = position.find(t);
    if (si == position.end() || ti == position.end()) continue;
    out[si->second].push_back(ti->second);
    ++indegree[ti->second];
  }
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < indegree.size(); ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::size_t i = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(spec.nodes[i].name);
    for (std::size_t t : out[i]) {
      if (--indegree[t] == 0) ready.insert(t);
    }
  }
  return order;
}

}  // namespace graphy::inspection
