#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "graphy/graph/node_id.hpp"
#include "graphy/graph/property.hpp"

namespace graphy::graph {

enum class NodeKind { fact, dimension };
enum class EdgeKind { has_dimension, navigates_to };
enum class Direction { out, in, both };

std::string_view to_string(NodeKind kind) noexcept;
std::string_view to_string(EdgeKind kind) noexcept;
std::string_view to_string(Direction direction) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view name) noexcept;
std::optional<EdgeKind> parse_edge_kind(std::string_view name) noexcept;
std::optional<Direction> parse_direction(std::string_view name) noexcept;

inline constexpr EdgeKind kAllEdgeKinds[] = {EdgeKind::has_dimension, EdgeKind::navigates_to};

struct Node {
  NodeId id;
  std::string label;
  NodeKind kind = NodeKind::fact;
  std::optional<NodeId> owner;  // dimensions only
  Properties properties;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  NodeId source;
  NodeId target;
  EdgeKind kind = EdgeKind::navigates_to;
  Properties properties;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct PropertySpec {
  ValueType type = ValueType::text;
  bool required = false;

  friend bool operator==(const PropertySpec&, const PropertySpec&) = default;
};

/// Property schema of one label. Keys keep their declaration order, which
/// callers use to pick a "primary" field.
class LabelSchema {
 public:
  LabelSchema() = default;
  explicit LabelSchema(NodeKind kind) : kind_(kind) {}

  NodeKind kind() const noexcept { return kind_; }
  LabelSchema& add(const std::string& key, ValueType type, bool required = false);
  const PropertySpec* find(std::string_view key) const;
  const std::vector<std::string>& keys() const noexcept { return order_; }
  bool empty() const noexcept { return order_.empty(); }

  /// First text-typed key in declaration order, if any.
  std::optional<std::string> primary_text_field() const;

  nlohmann::json to_json() const;
  static LabelSchema from_json(const nlohmann::json& j);

  friend bool operator==(const LabelSchema&, const LabelSchema&) = default;

 private:
  NodeKind kind_ = NodeKind::fact;
  std::map<std::string, PropertySpec, std::less<>> specs_;
  std::vector<std::string> order_;
};

class GraphSchema {
 public:
  /// Declares or extends a label. Kind and existing value types are fixed once
  /// declared; new keys are appended; required flags follow the latest call.
  void declare(const std::string& label, const LabelSchema& schema);

  const LabelSchema* find(std::string_view label) const;
  const LabelSchema& at(std::string_view label) const;  // throws UnknownLabel
  bool has_label(std::string_view label) const { return find(label) != nullptr; }
  std::vector<std::string> labels() const;
  std::vector<std::string> labels(NodeKind kind) const;

  /// Throws SchemaViolation unless `properties` conform to the label.
  void validate(std::string_view label, NodeKind kind, const Properties& properties) const;

  nlohmann::json to_json() const;
  static GraphSchema from_json(const nlohmann::json& j);

  friend bool operator==(const GraphSchema&, const GraphSchema&) = default;

 private:
  std::map<std::string, LabelSchema, std::less<>> labels_;
};

}  // namespace graphy::graph
