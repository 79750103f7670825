#include "graphy/navigation/expand.hpp"

#include <future>
#include <map>
#include <set>

#include "graphy/error.hpp"
#include "graphy/inspection/materialize.hpp"
#include "graphy/navigation/title.hpp"

namespace graphy::navigation {

using graph::NodeId;

namespace {

struct Inspected {
  std::optional<inspection::InspectionOutput> output;
  std::string error;
};

Inspected fetch_and_inspect(const RepositoryHit& hit, const inspection::WorkflowSpec& spec,
                            const inspection::InspectionServices& services) {
  Inspected r;
  try {
    auto doc = hit.document->get();
    doc.doc_id = hit.repo_doc_id;
    auto out = inspection::run_inspection(doc, spec, services);
    for (const auto& [k, v] : hit.metadata) out.metadata.emplace(k, v);
    r.output = std::move(out);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RepositoryUnavailable) throw;
    r.error = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

class Expander {
 public:
  Expander(graph::GraphStore& store, const ExpansionBudget& budget, const inspection::WorkflowSpec& spec,
           const Repository& repo, const inspection::InspectionServices& services, const ExpansionOptions& options)
      : store_(store), budget_(budget), spec_(spec), repo_(repo), services_(services), options_(options) {
    if (const auto* node = spec.find(options.reference_node)) {
      ref_label_ = node->label;
      ref_field_ = node->output_schema.primary_text_field();
    }
  }

  GraphDelta run(const std::vector<NodeId>& seeds) {
    std::vector<NodeId> frontier;
    std::set<NodeId> queued;
    for (const auto& s : seeds) {
      auto node = store_.get(s);
      if (node.kind != graph::NodeKind::fact) fail(ErrorCode::KindViolation, "seed " + s.hex() + " is not a fact");
      if (queued.insert(s).second) frontier.push_back(s);
    }
    for (std::size_t depth = 0; depth < budget_.max_depth && !frontier.empty(); ++depth) {
      std::vector<NodeId> next;
      for (const auto& fact : frontier) {
        for (const auto& created : expand_fact(fact)) {
          if (queued.insert(created).second) next.push_back(created);
        }
      }
      frontier = std::move(next);
    }
    return std::move(delta_);
  }

 private:
  std::vector<std::string> references_of(const NodeId& fact) {
    std::vector<std::string> refs;
    if (ref_label_.empty() || ref_field_.empty()) return refs;
    for (const auto& dim : store_.dimensions_of(fact, ref_label_)) {
      auto it = dim.properties.find(ref_field_);
      if (it == dim.properties.end()) continue;
      if (const auto* s = std::get_if<std::string>(&it->second)) refs.push_back(*s);
    }
    return refs;
  }

  // Seeds without reference dimensions are looked up by title and inspected once.
  void inspect_seed(const NodeId& fact) {
    auto node = store_.get(fact);
    auto title_it = node.properties.find("title");
    if (title_it == node.properties.end()) return;
    const auto* title = std::get_if<std::string>(&title_it->second);
    if (!title) return;
    std::optional<RepositoryHit> hit;
    try {
      hit = resolve_reference(make_reference(*title, fact), repo_, options_.fuzzy_threshold);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyTitle) throw;
    }
    if (!hit) return;
    auto inspected = fetch_and_inspect(*hit, spec_, services_);
    if (!inspected.output) {
      ++delta_.stats.failed_documents;
      delta_.stats.failures.push_back(hit->repo_doc_id + ": " + inspected.error);
      return;
    }
    inspection::materialize(store_, spec_, *inspected.output, *title);
    ++delta_.stats.seeds_inspected;
  }

  void link(const NodeId& from, const NodeId& to) {
    if (from == to) return;
    if (store_.has_edge(from, to, graph::EdgeKind::navigates_to)) return;
    store_.link_facts(from, to);
    delta_.new_links.emplace_back(from, to);
  }

  std::vector<NodeId> expand_fact(const NodeId& fact) {
    auto refs = references_of(fact);
    if (refs.empty()) {
      inspect_seed(fact);
      refs = references_of(fact);
    }
    if (refs.size() > budget_.per_fact_reference_cap) {
      delta_.stats.references_over_cap += refs.size() - budget_.per_fact_reference_cap;
      refs.resize(budget_.per_fact_reference_cap);
    }

    // Resolve in extraction order; remember which targets still need a fact.
    struct Pending {
      NodeId id;
      RepositoryHit hit;
    };
    std::vector<NodeId> link_order;
    std::vector<Pending> pending;
    std::set<NodeId> pending_ids;
    for (const auto& raw : refs) {
      ++delta_.stats.references_considered;
      std::optional<RepositoryHit> hit;
      try {
        hit = resolve_reference(make_reference(raw, fact), repo_, options_.fuzzy_threshold);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyTitle) throw;
      }
      if (!hit) {
        ++delta_.stats.dropped_references;
        continue;
      }
      ++delta_.stats.resolved;
      NodeId target;
      try {
        target = canonical_id(hit->title);
      } catch (const Error&) {
        ++delta_.stats.dropped_references;
        continue;
      }
      if (target == fact) continue;
      link_order.push_back(target);
      if (store_.contains(target)) {
        ++delta_.stats.existing;
      } else if (pending_ids.insert(target).second) {
        pending.push_back(Pending{target, *hit});
      }
    }

    // Fetch and inspect new documents in waves no larger than the remaining budget.
    std::set<NodeId> created;
    std::vector<NodeId> created_order;
    std::size_t cursor = 0;
    while (cursor < pending.size()) {
      const std::size_t remaining = budget_.max_new_facts - delta_.new_facts.size();
      if (remaining == 0) break;
      const std::size_t wave = std::min({remaining, pending.size() - cursor, std::max<std::size_t>(1, options_.workers)});
      std::vector<std::future<Inspected>> futures;
      for (std::size_t i = 0; i < wave; ++i) {
        const auto& p = pending[cursor + i];
        futures.push_back(std::async(std::launch::async, fetch_and_inspect, std::cref(p.hit), std::cref(spec_),
                                     std::cref(services_)));
      }
      std::vector<Inspected> results;
      for (auto& f : futures) results.push_back(f.get());
      for (std::size_t i = 0; i < wave; ++i) {
        const auto& p = pending[cursor + i];
        if (!results[i].output) {
          ++delta_.stats.failed_documents;
          delta_.stats.failures.push_back(p.hit.repo_doc_id + ": " + results[i].error);
          continue;
        }
        auto m = inspection::materialize(store_, spec_, *results[i].output, p.hit.title);
        delta_.new_facts.push_back(m.fact);
        for (const auto& d : store_.dimensions_of(m.fact)) delta_.new_dimensions.push_back(d.id);
        created.insert(m.fact);
        created_order.push_back(m.fact);
      }
      cursor += wave;
    }
    delta_.stats.budget_skipped += pending.size() - cursor;

    for (const auto& target : link_order) {
      if (store_.contains(target)) link(fact, target);
    }
    return created_order;
  }

  graph::GraphStore& store_;
  const ExpansionBudget& budget_;
  const inspection::WorkflowSpec& spec_;
  const Repository& repo_;
  const inspection::InspectionServices& services_;
  const ExpansionOptions& options_;
  std::string ref_label_;
  std::string ref_field_;
  GraphDelta delta_;
};

}  // namespace

GraphDelta expand(graph::GraphStore& store, const std::vector<NodeId>& seeds, const ExpansionBudget& budget,
                  const inspection::WorkflowSpec& spec, const Repository& repo,
                  const inspection::InspectionServices& services, const ExpansionOptions& options) {
  if (budget.per_fact_reference_cap < 1) fail(ErrorCode::InvalidParams, "per_fact_reference_cap must be at least 1");
  return Expander(store, budget, spec, repo, services, options).run(seeds);
}

nlohmann::json to_json(const GraphDelta& delta) {
  auto ids = [](const std::vector<NodeId>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& id : v) a.push_back(id.hex());
    return a;
  };
  nlohmann::json links = nlohmann::json::array();
  for (const auto& [s, t] : delta.new_links) links.push_back({{"source", s.hex()}, {"target", t.hex()}});
  const auto& s = delta.stats;
  return {{"new_facts", ids(delta.new_facts)},
          {"new_dimensions", ids(delta.new_dimensions)},
          {"new_links", links},
          {"stats",
           {{"references_considered", s.references_considered},
            {"references_over_cap", s.references_over_cap},
            {"resolved", s.resolved},
            {"dropped_references", s.dropped_references},
            {"existing", s.existing},
            {"failed_documents", s.failed_documents},
            {"budget_skipped", s.budget_skipped},
            {"seeds_inspected", s.seeds_inspected},
            {"failures", s.failures}}}};
}

}  // namespace graphy::navigation
