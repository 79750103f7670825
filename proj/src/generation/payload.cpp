#include "graphy/generation/payload.hpp"

#include <algorithm>
#include <set>

#include "graphy/error.hpp"

namespace graphy::generation {

using nlohmann::json;

std::string PayloadRow::text(const std::string& attribute) const {
  auto it = attributes.find(attribute);
  return it == attributes.end() || !it->second ? std::string() : graph::display(*it->second);
}

const PayloadRow* PayloadTable::find(const NodeId& fact) const {
  for (const auto& r : rows) {
    if (r.fact == fact) return &r;
  }
  return nullptr;
}

std::string primary_text(const graph::GraphSchema& schema, const std::string& label, const DimensionItem& item) {
  if (const auto* ls = schema.find(label)) {
    for (const auto& key : ls->keys()) {
      auto it = item.properties.find(key);
      if (it != item.properties.end() && std::holds_alternative<std::string>(it->second)) {
        return std::get<std::string>(it->second);
      }
    }
  }
  for (const auto& [key, value] : item.properties) {
    if (std::holds_alternative<std::string>(value)) return std::get<std::string>(value);
  }
  return {};
}

PayloadTable collect_payload(const graph::GraphStore& store, const std::vector<NodeId>& selected,
                             const ReportIntent& intent) {
  if (selected.empty()) fail(ErrorCode::UnknownFact, "no facts are selected");
  std::vector<std::string> attributes = intent.required_attributes;
  if (std::find(attributes.begin(), attributes.end(), "title") == attributes.end()) attributes.insert(attributes.begin(), "title");
  PayloadTable table;
  std::set<NodeId> seen;
  for (const auto& id : selected) {
    if (!seen.insert(id).second) continue;
    auto node = store.find(id);
    if (!node || node->kind != graph::NodeKind::fact) fail(ErrorCode::UnknownFact, "no fact with id " + id.hex());
    PayloadRow row;
    row.fact = id;
    for (const auto& a : attributes) {
      auto it = node->properties.find(a);
      row.attributes[a] = it == node->properties.end() ? std::nullopt : std::optional<graph::PropertyValue>(it->second);
    }
    for (const auto& d : intent.required_dimensions) {
      auto& items = row.dimensions[d];
      for (const auto& dim : store.dimensions_of(id, d)) items.push_back(DimensionItem{dim.id, dim.properties});
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

json to_json(const PayloadTable& payload) {
  json rows = json::array();
  for (const auto& r : payload.rows) {
    json attributes = json::object();
    for (const auto& [k, v] : r.attributes) attributes[k] = v ? graph::to_json(*v) : json(nullptr);
    json dimensions = json::object();
    for (const auto& [label, items] : r.dimensions) {
      json list = json::array();
      for (const auto& item : items) list.push_back(json{{"id", item.id.hex()}, {"properties", graph::to_json(item.properties)}});
      dimensions[label] = list;
    }
    rows.push_back(json{{"fact", r.fact.hex()}, {"attributes", attributes}, {"dimensions", dimensions}});
  }
  return json{{"rows", rows}};
}

}  // namespace graphy::generation
