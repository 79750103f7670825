#include "graphy/graph/schema.hpp"

#include "graphy/error.hpp"

namespace graphy::graph {

std::string_view to_string(NodeKind kind) noexcept {
  return kind == NodeKind::fact ? "fact" : "dimension";
}

std::string_view to_string(EdgeKind kind) noexcept {
  return kind == EdgeKind::has_dimension ? "HAS_DIMENSION" : "NAVIGATES_TO";
}

std::string_view to_string(Direction direction) noexcept {
  switch (direction) {
    case Direction::out: return "out";
    case Direction::in: return "in";
    case Direction::both: return "both";
  }
  return "out";
}

std::optional<NodeKind> parse_node_kind(std::string_view name) noexcept {
  if (name == "fact") return NodeKind::fact;
  if (name == "dimension") return NodeKind::dimension;
  return std::nullopt;
}

std::optional<EdgeKind> parse_edge_kind(std::string_view name) noexcept {
  if (name == "HAS_DIMENSION") return EdgeKind::has_dimension;
  if (name == "NAVIGATES_TO") return EdgeKind::navigates_to;
  return std::nullopt;
}

std::optional<Direction> parse_direction(std::string_view name) noexcept {
  if (name == "out") return Direction::out;
  if (name == "in") return Direction::in;
  if (name == "both") return Direction::both;
  return std::nullopt;
}

LabelSchema& LabelSchema::add(const std::string& key, ValueType type, bool required) {
  auto it = specs_.find(key);
  if (it == specs_.end()) {
    specs_.emplace(key, PropertySpec{type, required});
    order_.push_back(key);
  } else {
    it->second = PropertySpec{type, required};
  }
  return *this;
}

const PropertySpec* LabelSchema::find(std::string_view key) const {
  auto it = specs_.find(key);
  return it == specs_.end() ? nullptr : &it->second;
}

std::optional<std::string> LabelSchema::primary_text_field() const {
  for (const auto& key : order_) {
    if (specs_.at(key).type == ValueType::text) return key;
  }
  return std::nullopt;
}

nlohmann::json LabelSchema::to_json() const {
  nlohmann::json props = nlohmann::json::array();
  for (const auto& key : order_) {
    const auto& spec = specs_.at(key);
    props.push_back({{"key", key}, {"type", to_string(spec.type)}, {"required", spec.required}});
  }
  return {{"node_kind", to_string(kind_)}, {"properties", props}};
}

LabelSchema LabelSchema::from_json(const nlohmann::json& j) {
  auto kind = parse_node_kind(j.value("node_kind", "fact"));
  if (!kind) fail(ErrorCode::SchemaViolation, "unknown node kind in schema");
  LabelSchema schema(*kind);
  for (const auto& p : j.value("properties", nlohmann::json::array())) {
    auto type = parse_value_type(p.at("type").get<std::string>());
    if (!type) fail(ErrorCode::SchemaViolation, "unknown value type in schema");
    schema.add(p.at("key").get<std::string>(), *type, p.value("required", false));
  }
  return schema;
}

void GraphSchema::declare(const std::string& label, const LabelSchema& schema) {
  if (label.empty()) fail(ErrorCode::SchemaViolation, "label must be non-empty");
  auto it = labels_.find(label);
  if (it == labels_.end()) {
    labels_.emplace(label, schema);
    return;
  }
  LabelSchema& existing = it->second;
  if (existing.kind() != schema.kind()) {
    fail(ErrorCode::SchemaViolation, "label '" + label + "' already declared as " +
                                         std::string(to_string(existing.kind())));
  }
  for (const auto& key : schema.keys()) {
    const PropertySpec* incoming = schema.find(key);
    if (const PropertySpec* current = existing.find(key);
        current && current->type != incoming->type) {
      fail(ErrorCode::SchemaViolation,
           "property '" + label + "." + key + "' is declared as " +
               std::string(to_string(current->type)) + ", cannot redeclare as " +
               std::string(to_string(incoming->type)));
    }
  }
  for (const auto& key : schema.keys()) {
    const PropertySpec* incoming = schema.find(key);
    existing.add(key, incoming->type, incoming->required);
  }
}

const LabelSchema* GraphSchema::find(std::string_view label) const {
  auto it = labels_.find(label);
  return it == labels_.end() ? nullptr : &it->second;
}

const LabelSchema& GraphSchema::at(std::string_view label) const {
  const LabelSchema* schema = find(label);
  if (!schema) fail(ErrorCode::UnknownLabel, "unknown label '" + std::string(label) + "'");
  return *schema;
}

std::vector<std::string> GraphSchema::labels() const {
  std::vector<std::string> out;
  for (const auto& [label, _] : labels_) out.push_back(label);
  return out;
}

std::vector<std::string> GraphSchema::labels(NodeKind kind) const {
  std::vector<std::string> out;
  for (const auto& [label, schema] : labels_) {
    if (schema.kind() == kind) out.push_back(label);
  }
  return out;
}

void GraphSchema::validate(std::string_view label, NodeKind kind,
                           const Properties& properties) const {
  const LabelSchema* schema = find(label);
  if (!schema) fail(ErrorCode::SchemaViolation, "unknown label '" + std::string(label) + "'");
  if (schema->kind() != kind) {
    fail(ErrorCode::SchemaViolation, "label '" + std::string(label) + "' is a " +
                                         std::string(to_string(schema->kind())) + " label");
  }
  for (const auto& [key, value] : properties) {
    const PropertySpec* spec = schema->find(key);
    if (!spec) {
      fail(ErrorCode::SchemaViolation,
           "property '" + key + "' is not declared for label '" + std::string(label) + "'");
    }
    if (type_of(value) != spec->type) {
      fail(ErrorCode::SchemaViolation,
           "property '" + key + "' expects " + std::string(to_string(spec->type)) + ", got " +
               std::string(to_string(type_of(value))));
    }
    if (const auto* list = std::get_if<TextList>(&value)) {
      for (const auto& entry : *list) {
        if (entry.empty()) {
          fail(ErrorCode::SchemaViolation, "property '" + key + "' contains an empty entry");
        }
      }
    }
  }
  for (const auto& key : schema->keys()) {
    if (schema->find(key)->required && !properties.contains(key)) {
      fail(ErrorCode::SchemaViolation,
           "required property '" + key + "' missing for label '" + std::string(label) + "'");
    }
  }
}

nlohmann::json GraphSchema::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [label, schema] : labels_) out[label] = schema.to_json();
  return out;
}

GraphSchema GraphSchema::from_json(const nlohmann::json& j) {
  GraphSchema schema;
  for (const auto& [label, body] : j.items()) schema.declare(label, LabelSchema::from_json(body));
  return schema;
}

}  // namespace graphy::graph
