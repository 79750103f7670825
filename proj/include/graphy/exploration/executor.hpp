#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "graphy/exploration/query_ir.hpp"
#include "graphy/graph/graph_store.hpp"

namespace graphy::exploration {

struct Group {
  std::optional<PropertyValue> key;  // nullopt = missing; bin index for binned aggregates
  std::size_t count = 0;
  std::vector<NodeId> members;  // sorted by id
};

struct QueryResult {
  std::vector<graph::Node> rows;  // row queries: by id, or by the sort key
  std::vector<Group> groups;      // aggregates: by key ascending, missing last
  std::size_t total = 0;          // matches before the limit
};

/// Runs an IR against the store. Validates it against the store schema first.
QueryResult execute(const graph::GraphStore& store, const QueryIR& ir);

/// Matching nodes without aggregate, sort or limit, by id.
std::vector<graph::Node> population(const graph::GraphStore& store, const QueryIR& ir);

/// Visits the nodes `population` would return, by id, without copying them.
/// `fn` must not call back into the store.
void for_each_match(const graph::GraphStore& store, const QueryIR& ir,
                    const std::function<void(const graph::Node&)>& fn);

/// Groups `rows` as an aggregate query would: by key ascending, missing last.
std::vector<Group> group_nodes(const std::vector<graph::Node>& rows, const Aggregate& aggregate);

}  // namespace graphy::exploration
