#pragma once

#include <string>

#include "graphy/graph/graph_store.hpp"
#include "graphy/inspection/runner.hpp"

namespace graphy::inspection {

/// Declares the fact label (title and doc_id plus every single-typed
/// attribute field, all optional but title) and one dimension label per
/// dimension-producing subnode. Throws SchemaViolation on type conflicts.
void declare_workflow_schema(graph::GraphStore& store, const WorkflowSpec& spec);

/// "title" fact property, then metadata title, then the first non-empty
/// line of the document. Throws EmptyTitle.
std::string infer_title(const InspectionOutput& output);

struct Materialized {
  graph::NodeId fact;
  std::string title;
  std::size_t dimensions = 0;
};

/// Upserts the fact (id = canonical_id(title)) and its dimensions.
/// `title_override` wins over inference when non-empty.
Materialized materialize(graph::GraphStore& store, const WorkflowSpec& spec, const InspectionOutput& output,
                         const std::string& title_override = {});

}  // namespace graphy::inspection
