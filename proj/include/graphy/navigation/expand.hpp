#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "graphy/graph/graph_store.hpp"
#include "graphy/inspection/runner.hpp"
#include "graphy/navigation/repository.hpp"

namespace graphy::navigation {

struct ExpansionBudget {
  std::size_t max_depth = 1;
  std::size_t max_new_facts = 10;
  std::size_t per_fact_reference_cap = 10;
};

struct ExpansionOptions {
  std::string reference_node = "References";  // subnode whose dimensions hold references
  double fuzzy_threshold = kDefaultFuzzyThreshold;
  std::size_t workers = 4;  // concurrent fetch + inspection per wave
};

struct ExpansionStats {
  std::size_t references_considered = 0;
  std::size_t references_over_cap = 0;
  std::size_t resolved = 0;
  std::size_t dropped_references = 0;  // no repository match
  std::size_t existing = 0;            // resolved to a fact already in the graph
  std::size_t failed_documents = 0;
  std::size_t budget_skipped = 0;      // matched but not created: budget exhausted
  std::size_t seeds_inspected = 0;
  std::vector<std::string> failures;   // "repo_doc_id: reason"
};

struct GraphDelta {
  std::vector<graph::NodeId> new_facts;
  std::vector<graph::NodeId> new_dimensions;
  std::vector<std::pair<graph::NodeId, graph::NodeId>> new_links;  // citing -> cited
  ExpansionStats stats;
};

/// Breadth-first expansion from `seeds`. Depth-d frontier facts have their
/// references (first per_fact_reference_cap, in extraction order) resolved
/// against `repo`; unseen hits are fetched, inspected and added as facts of
/// depth d+1 while the budget lasts; every resolved reference gets a
/// NAVIGATES_TO edge from citing to cited fact. Known facts are linked, not
/// re-inspected. Throws UnknownNode for a missing seed and propagates
/// RepositoryUnavailable.
GraphDelta expand(graph::GraphStore& store, const std::vector<graph::NodeId>& seeds, const ExpansionBudget& budget,
                  const inspection::WorkflowSpec& spec, const Repository& repo,
                  const inspection::InspectionServices& services, const ExpansionOptions& options = {});

nlohmann::json to_json(const GraphDelta& delta);

}  // namespace graphy::navigation
