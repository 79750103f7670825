#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "support.hpp"

namespace graphy::testing {

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

/// A rule subnode "name" over `x`; failing nodes use a pattern that never matches.
nlohmann::json rule_node(const std::string& name, bool fails = false);

/// Random workflow over nodes n0..n{n-1}. Acyclic graphs only have edges
/// along a hidden random order; cyclic ones add one back edge. Nodes in
/// `failing` never match.
nlohmann::json random_workflow(Rng& rng, std::size_t n, bool acyclic, EdgeList& edges,
                               const std::set<std::size_t>& failing = {});

/// Iterative indegree elimination.
bool oracle_acyclic(std::size_t n, const EdgeList& edges);

/// Nodes with at least one failing proper ancestor.
std::set<std::size_t> oracle_skipped(std::size_t n, const EdgeList& edges, const std::set<std::size_t>& failing);

struct DagReport {
  std::size_t graphs = 0;
  std::size_t trials = 0;
  std::size_t topo_violations = 0;
  std::size_t cycle_acceptances = 0;
  std::size_t cycle_rejections_missed = 0;  // acyclic specs rejected
  std::size_t status_mismatches = 0;
  std::size_t monotonicity_violations = 0;

  bool ok() const {
    return topo_violations + cycle_acceptances + cycle_rejections_missed + status_mismatches + monotonicity_violations == 0;
  }
};

/// `dags` acyclic plus `dags` cyclic graphs of 2..max_nodes nodes, then
/// `trials` failure injections: each runs a random DAG with failing set F
/// and with F plus one node, checking statuses against oracle_skipped and
/// that the skipped set only grows.
DagReport check_dag_properties(Rng& rng, std::size_t dags, std::size_t trials, std::size_t max_nodes);

}  // namespace graphy::testing
