#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphy/generation/intent.hpp"
#include "graphy/graph/graph_store.hpp"

namespace graphy::generation {

using graph::NodeId;

struct DimensionItem {
  NodeId id;
  graph::Properties properties;
};

struct PayloadRow {
  NodeId fact;
  std::map<std::string, std::optional<graph::PropertyValue>> attributes;  // nullopt = absent
  std::map<std::string, std::vector<DimensionItem>> dimensions;          // empty = absent

  /// Display text of an attribute, or empty when absent.
  std::string text(const std::string& attribute) const;
};

struct PayloadTable {
  std::vector<PayloadRow> rows;  // selection order, duplicates removed

  const PayloadRow* find(const NodeId& fact) const;
};

/// One row per selected fact with the intent's attributes and dimensions.
/// "title" is always collected for bibliographies. Throws UnknownFact.
PayloadTable collect_payload(const graph::GraphStore& store, const std::vector<NodeId>& selected,
                             const ReportIntent& intent);

/// Primary text of a dimension item: its first text property in schema order.
std::string primary_text(const graph::GraphSchema& schema, const std::string& label, const DimensionItem& item);

nlohmann::json to_json(const PayloadTable& payload);

}  // namespace graphy::generation
