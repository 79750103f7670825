#include "graphy/exploration/executor.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "graphy/error.hpp"

namespace graphy::exploration {

namespace {

const PropertyValue* attribute_of(const graph::Node& node, const std::string& attribute) {
  auto it = node.properties.find(attribute);
  return it == node.properties.end() ? nullptr : &it->second;
}

bool passes(const graph::Node& node, const QueryIR& ir, const std::set<NodeId>& exclude) {
  if (node.label != ir.match.label || exclude.count(node.id)) return false;
  for (const auto& f : ir.filters) {
    if (!f.matches(node)) return false;
  }
  return true;
}

std::vector<graph::Node> matched(const graph::GraphStore& store, const QueryIR& ir) {
  std::vector<graph::Node> out;
  for_each_match(store, ir, [&](const graph::Node& node) { out.push_back(node); });
  return out;
}

struct KeyLess {
  bool operator()(const PropertyValue& a, const PropertyValue& b) const {
    const int c = compare_values(a, b);
    if (c != 0) return c < 0;
    return a.index() < b.index();
  }
};

}  // namespace

void for_each_match(const graph::GraphStore& store, const QueryIR& ir,
                    const std::function<void(const graph::Node&)>& fn) {
  const auto& m = ir.match;
  const std::set<NodeId> exclude(m.exclude.begin(), m.exclude.end());
  auto visit = [&](const graph::Node& node) {
    if (passes(node, ir, exclude)) fn(node);
  };
  if (!m.edge && !m.anchors) {
    store.for_each(m.label, visit);
    return;
  }
  std::set<NodeId> ids;
  if (m.edge && m.anchors) {
    for (const auto& s : *m.anchors) {
      if (!store.contains(s)) continue;
      for (const auto& t : store.neighbors(s, m.edge->kind, m.edge->direction)) ids.insert(t);
    }
  } else if (m.edge) {
    for (const auto& e : store.edges()) {
      if (e.kind != m.edge->kind) continue;
      if (m.edge->direction != graph::Direction::in) ids.insert(e.target);
      if (m.edge->direction != graph::Direction::out) ids.insert(e.source);
    }
  } else {
    ids.insert(m.anchors->begin(), m.anchors->end());
  }
  store.for_each_of({ids.begin(), ids.end()}, visit);
}

std::vector<graph::Node> population(const graph::GraphStore& store, const QueryIR& ir) {
  ir.validate(store.schema());
  return matched(store, ir);
}

std::vector<Group> group_nodes(const std::vector<graph::Node>& rows, const Aggregate& agg) {
  std::map<PropertyValue, Group, KeyLess> groups;
  Group missing;
  for (const auto& node : rows) {
    const PropertyValue* v = attribute_of(node, agg.group_by);
    std::optional<PropertyValue> key;
    if (v && agg.bins) {
      if (std::holds_alternative<std::int64_t>(*v)) {
        key = static_cast<std::int64_t>(agg.bins->index_of(static_cast<double>(std::get<std::int64_t>(*v))));
      } else if (std::holds_alternative<double>(*v)) {
        key = static_cast<std::int64_t>(agg.bins->index_of(std::get<double>(*v)));
      }
    } else if (v) {
      key = *v;
    }
    Group& g = key ? groups[*key] : missing;
    g.key = key;
    ++g.count;
    g.members.push_back(node.id);
  }
  std::vector<Group> out;
  for (auto& [k, g] : groups) out.push_back(std::move(g));
  if (missing.count) out.push_back(std::move(missing));
  return out;
}

QueryResult execute(const graph::GraphStore& store, const QueryIR& ir) {
  ir.validate(store.schema());
  QueryResult result;
  auto rows = matched(store, ir);
  result.total = rows.size();
  if (ir.aggregate) {
    result.groups = group_nodes(rows, *ir.aggregate);
    if (ir.limit && result.groups.size() > *ir.limit) result.groups.resize(*ir.limit);
    return result;
  }
  if (ir.sort) {
    const auto& s = *ir.sort;
    std::stable_sort(rows.begin(), rows.end(), [&](const graph::Node& a, const graph::Node& b) {
      const PropertyValue* x = attribute_of(a, s.attribute);
      const PropertyValue* y = attribute_of(b, s.attribute);
      if (!x || !y) {
        if (x || y) return x != nullptr;
        return a.id < b.id;
      }
      const int c = compare_values(*x, *y);
      if (c != 0) return s.direction == SortDirection::asc ? c < 0 : c > 0;
      return a.id < b.id;
    });
  }
  if (ir.limit && rows.size() > *ir.limit) rows.resize(*ir.limit);
  result.rows = std::move(rows);
  return result;
}

}  // namespace graphy::exploration
