#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "graphy/graph/graph_store.hpp"
#include "support.hpp"

namespace graphy::testing {

struct OracleReport {
  std::size_t checks = 0;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok && failures.size() < 20) failures.push_back(what);
  }
  bool ok() const { return failures.empty(); }
};

/// Paper nodes with randomly missing year (integer), citation_count
/// (integer), score (real) and venue (text), plus random NAVIGATES_TO edges.
void populate_random_graph(graph::GraphStore& store, Rng& rng, std::size_t nodes);

/// Histogram counts, bucket filters, neighbor sets, prequery populations and
/// top-k refinement against brute-force recomputation over the raw node and
/// edge lists.
OracleReport check_exploration_oracles(const graph::GraphStore& store, Rng& rng);

/// Random search/histogram/bucket/prequery/refine/promote actions (valid and
/// invalid) checking canvas disjointness after each, then replay equality.
OracleReport fuzz_session(const graph::GraphStore& store, Rng& rng, std::size_t steps);

}  // namespace graphy::testing
