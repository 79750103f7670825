#include "graphy/shell/scrape.hpp"

#include <filesystem>
#include <set>

#include "graphy/error.hpp"
#include "graphy/inspection/materialize.hpp"
#include "graphy/navigation/title.hpp"

namespace graphy::shell {

using graph::NodeId;
namespace fs = std::filesystem;

namespace {

std::size_t count_kind(const graph::GraphStore& store, graph::NodeKind kind) {
  std::size_t n = 0;
  for (const auto& node : store.nodes()) n += node.kind == kind;
  return n;
}

std::size_t count_links(const graph::GraphStore& store) {
  std::size_t n = 0;
  for (const auto& e : store.edges()) n += e.kind == graph::EdgeKind::navigates_to;
  return n;
}

}  // namespace

ScrapeSummary scrape(App& app, const std::vector<std::string>& seeds, const navigation::ExpansionBudget& budget) {
  ScrapeSummary summary;
  summary.seeds = seeds.size();
  if (seeds.empty()) return summary;

  auto& store = app.store();
  const auto& spec = app.workflow();
  const auto services = app.services();
  inspection::declare_workflow_schema(store, spec);
  const auto facts_before = count_kind(store, graph::NodeKind::fact);
  const auto dims_before = count_kind(store, graph::NodeKind::dimension);
  const auto links_before = count_links(store);

  const navigation::Repository* repo = nullptr;
  std::vector<NodeId> roots;
  std::set<NodeId> seen;
  for (const auto& seed : seeds) {
    std::error_code ec;
    NodeId id;
    if (fs::is_regular_file(seed, ec)) {
      auto doc = ingest::load_document(seed);
      id = inspection::materialize(store, spec, inspection::run_inspection(doc, spec, services)).fact;
    } else {
      if (!repo) repo = app.repository();
      if (!repo) fail(ErrorCode::ConfigError, "seed '" + seed + "' is not a file and no repository is configured");
      id = navigation::canonical_id(seed);
      if (!store.contains(id)) store.upsert_fact(id, spec.fact_label, {{"title", seed}});
    }
    if (seen.insert(id).second) roots.push_back(id);
  }

  if (!repo) repo = app.repository();
  if (repo) {
    navigation::ExpansionOptions options;
    options.workers = app.config().workers;
    auto delta = navigation::expand(store, roots, budget, spec, *repo, services, options);
    summary.dropped_references = delta.stats.dropped_references;
    summary.failed_documents = delta.stats.failed_documents;
    summary.failures = delta.stats.failures;
  }

  summary.facts = count_kind(store, graph::NodeKind::fact) - facts_before;
  summary.dimensions = count_kind(store, graph::NodeKind::dimension) - dims_before;
  summary.edges = count_links(store) - links_before;
  store.compact();
  return summary;
}

nlohmann::json to_json(const ScrapeSummary& s) {
  return nlohmann::json{{"seeds", s.seeds},
                        {"facts", s.facts},
                        {"dimensions", s.dimensions},
                        {"edges", s.edges},
                        {"dropped_references", s.dropped_references},
                        {"failed_documents", s.failed_documents},
                        {"failures", s.failures}};
}

}  // namespace graphy::shell
