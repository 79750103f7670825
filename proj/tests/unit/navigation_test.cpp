#include <doctest.h>

#include <chrono>
#include <set>
#include <thread>

#include <httplib.h>

#include "graphy/error.hpp"
#include "graphy/inspection/materialize.hpp"
#include "graphy/navigation/expand.hpp"
#include "graphy/navigation/repository.hpp"
#include "graphy/navigation/title.hpp"
#include "graphy/providers/config.hpp"
#include "graphy/providers/embedder.hpp"
#include "support.hpp"

using namespace graphy;
using namespace graphy::navigation;
using graph::NodeId;
using graphy::testing::Rng;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoFailure;
}

class ListRepository final : public Repository {
 public:
  explicit ListRepository(std::vector<Candidate> c) : c_(std::move(c)) {}
  std::vector<Candidate> candidates(const ReferenceRecord&) const override { return c_; }
  ingest::RawDocument fetch(const std::string& id) const override {
    ++fetches;
    return ingest::RawDocument{id, ingest::DocumentKind::plaintext, "body of " + id, ""};
  }
  mutable std::atomic<int> fetches{0};

 private:
  std::vector<Candidate> c_;
};

struct Repo20 {
  inspection::WorkflowSpec spec;
  std::shared_ptr<providers::ProviderRegistry> providers;
  providers::HashEmbedder embedder;
  inspection::InspectionServices services;
  FixtureRepository repo{testing::fixture_path("repo20/manifest.json")};
  graph::GraphStore store;

  Repo20() {
    spec = inspection::parse_workflow_text(testing::read_file(testing::fixture_path("repo20/workflow.json")));
    providers = providers::load_providers_file(testing::fixture_path("repo20/providers.json"));
    services.providers = providers.get();
    services.embedder = &embedder;
    inspection::declare_workflow_schema(store, spec);
  }

  NodeId scrape(const std::string& id) {
    auto doc = ingest::load_document(testing::fixture_path("repo20/docs/" + id + ".json"), id);
    return inspection::materialize(store, spec, inspection::run_inspection(doc, spec, services)).fact;
  }

  NodeId id_of(const std::string& repo_id) {
    for (const auto& c : repo.candidates(ReferenceRecord{})) {
      if (c.repo_doc_id == repo_id) return canonical_id(c.title);
    }
    FAIL("unknown id");
    return {};
  }
};

}  // namespace

TEST_CASE("canonical ids ignore case and punctuation") {
  CHECK(canonical_id("The Llama 3 Herd of Models") == canonical_id("the llama 3 herd of models!"));
  CHECK(normalize_title("  Attention   is all you need. ") == "attention is all you need");
  CHECK(canonical_id("The Llama 3 Herd of Models").hex().size() == 32);
  CHECK(code_of([] { canonical_id(""); }) == ErrorCode::EmptyTitle);
  CHECK(code_of([] { canonical_id(" ?!. "); }) == ErrorCode::EmptyTitle);
}

TEST_CASE("1000 distinct titles give 1000 distinct ids") {
  Rng rng(5);
  std::set<std::string> titles;
  while (titles.size() < 1000) titles.insert(normalize_title(rng.sentence(2 + rng.index(8))));
  std::set<NodeId> ids;
  for (const auto& t : titles) ids.insert(canonical_id(t));
  CHECK(ids.size() == 1000);
}

TEST_CASE("exact normalized match resolves the reference") {
  FixtureRepository repo(testing::fixture_path("repo20/manifest.json"));
  auto hit = resolve_reference(make_reference("Attention is all you need.", NodeId::hash_of("s")), repo);
  REQUIRE(hit);
  CHECK(hit->repo_doc_id == "d01");
  CHECK(hit->title == "Attention Is All You Need");
  CHECK(hit->metadata.at("year") == "2017");
  CHECK_FALSE(resolve_reference(make_reference("A Survey of Quantum Knitting Patterns", NodeId::hash_of("s")), repo));
  CHECK(code_of([] { make_reference("...", NodeId::hash_of("s")); }) == ErrorCode::EmptyTitle);
}

TEST_CASE("fuzzy resolution prefers higher similarity, then the smaller repo id") {
  ListRepository repo(std::vector<Candidate>{{"r2", "Deep Graph Retrieval Methods", {}},
                       {"r1", "Deep Graph Retrieval Methodz", {}},
                       {"r3", "Deep Graph Retrieval Method", {}}});
  // r1 and r2 are equally close; the smaller id wins.
  auto hit = resolve_reference(make_reference("Deep Graph Retrieval Methodx", NodeId::hash_of("s")), repo);
  REQUIRE(hit);
  CHECK(hit->repo_doc_id == "r1");
  ListRepository closer(std::vector<Candidate>{{"a", "Sparse Retrieval at Scale Today", {}}, {"b", "Sparse Retrieval at Scale Todax", {}}});
  auto best = resolve_reference(make_reference("Sparse Retrieval at Scale Todax!", NodeId::hash_of("s")), closer);
  CHECK(best->repo_doc_id == "b");
  ListRepository far(std::vector<Candidate>{{"x", "Completely different words", {}}});
  CHECK_FALSE(resolve_reference(make_reference("Another title entirely", NodeId::hash_of("s")), far));
}

TEST_CASE("hit documents are fetched lazily and only once") {
  ListRepository repo(std::vector<Candidate>{{"r1", "Only Title", {}}});
  auto hit = resolve_reference(make_reference("Only Title", NodeId::hash_of("s")), repo);
  REQUIRE(hit);
  CHECK(repo.fetches == 0);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) threads.emplace_back([&] { (void)hit->document->get(); });
  for (auto& t : threads) t.join();
  CHECK(repo.fetches == 1);
  CHECK(hit->document->get().bytes == "body of r1");
}

TEST_CASE("expanding the seed with depth 1 and budget 10 adds its matched references") {
  Repo20 r;
  auto seed = r.scrape("d00");
  CHECK(r.store.dimensions_of(seed, "Reference").size() == 13);
  auto delta = expand(r.store, {seed}, ExpansionBudget{1, 10, 10}, r.spec, r.repo, r.services);
  std::vector<NodeId> expected;
  for (const char* id : {"d01", "d02", "d03", "d04", "d05", "d06", "d07", "d09"}) expected.push_back(r.id_of(id));
  CHECK(delta.new_facts == expected);
  CHECK(delta.new_links.size() == 8);
  CHECK(delta.stats.dropped_references == 2);
  CHECK(delta.stats.references_over_cap == 3);
  for (const auto& id : expected) {
    CHECK(r.store.has_edge(seed, id, graph::EdgeKind::navigates_to));
    CHECK(!r.store.dimensions_of(id, "Challenge").empty());
    CHECK(!r.store.dimensions_of(id).empty());
  }
  CHECK(std::get<std::int64_t>(r.store.get(r.id_of("d03")).properties.at("year")) == 2024);
  CHECK(std::get<std::string>(r.store.get(r.id_of("d03")).properties.at("title")) == "The Llama 3 Herd of Models");
  CHECK(r.store.scan("Paper").size() == 9);
}

TEST_CASE("zero budget only links facts already present") {
  Repo20 r;
  auto seed = r.scrape("d00");
  auto attention = r.scrape("d01");
  auto delta = expand(r.store, {seed}, ExpansionBudget{1, 0, 10}, r.spec, r.repo, r.services);
  CHECK(delta.new_facts.empty());
  CHECK(delta.new_dimensions.empty());
  REQUIRE(delta.new_links.size() == 1);
  CHECK(delta.new_links[0] == std::make_pair(seed, attention));
  CHECK(delta.stats.budget_skipped == 7);
}

TEST_CASE("a reference shared by two frontier facts yields one fact and two edges") {
  Repo20 r;
  auto seed = r.scrape("d00");
  auto word2vec = r.scrape("d10");
  auto delta = expand(r.store, {word2vec, seed}, ExpansionBudget{1, 10, 10}, r.spec, r.repo, r.services);
  auto attention = r.id_of("d01");
  CHECK(std::count(delta.new_facts.begin(), delta.new_facts.end(), attention) == 1);
  CHECK(r.store.has_edge(seed, attention, graph::EdgeKind::navigates_to));
  CHECK(r.store.has_edge(word2vec, attention, graph::EdgeKind::navigates_to));
  CHECK(r.store.neighbors(attention, graph::EdgeKind::navigates_to, graph::Direction::in).size() == 2);
}

TEST_CASE("already-present facts are linked but not re-inspected") {
  Repo20 r;
  auto seed = r.scrape("d00");
  expand(r.store, {seed}, ExpansionBudget{1, 10, 10}, r.spec, r.repo, r.services);
  const auto fetched = r.repo.fetch_count();
  auto again = expand(r.store, {seed}, ExpansionBudget{1, 10, 10}, r.spec, r.repo, r.services);
  CHECK(again.new_facts.empty());
  CHECK(again.new_links.empty());
  CHECK(again.stats.existing == 8);
  CHECK(r.repo.fetch_count() == fetched);
}

TEST_CASE("seeds without references are inspected first") {
  Repo20 r;
  auto seed = canonical_id("Graph-Based Retrieval for Progressive Literature Analysis");
  r.store.upsert_fact(seed, "Paper", {{"title", std::string("Graph-Based Retrieval for Progressive Literature Analysis")}});
  auto delta = expand(r.store, {seed}, ExpansionBudget{1, 3, 10}, r.spec, r.repo, r.services);
  CHECK(delta.stats.seeds_inspected == 1);
  CHECK(delta.new_facts.size() == 3);
}

TEST_CASE("missing seeds are rejected") {
  Repo20 r;
  CHECK(code_of([&] { expand(r.store, {NodeId::hash_of("nope")}, ExpansionBudget{}, r.spec, r.repo, r.services); }) ==
        ErrorCode::UnknownNode);
}

TEST_CASE("property: budgets, depth, edge direction, no duplicates and determinism") {
  Rng rng(8);
  for (int round = 0; round < 12; ++round) {
    ExpansionBudget budget{rng.index(4), rng.index(12), 1 + rng.index(6)};
    ExpansionOptions options;
    options.workers = 1 + rng.index(4);
    Repo20 a;
    auto seed_a = a.scrape("d00");
    auto before = a.store.scan("Paper").size();
    auto da = expand(a.store, {seed_a}, budget, a.spec, a.repo, a.services, options);
    CHECK(da.new_facts.size() <= budget.max_new_facts);
    CHECK(std::set<NodeId>(da.new_facts.begin(), da.new_facts.end()).size() == da.new_facts.size());
    CHECK(a.store.scan("Paper").size() == before + da.new_facts.size());
    // Depth check: every new fact is reachable from the seed within max_depth hops.
    std::map<NodeId, std::size_t> depth{{seed_a, 0}};
    std::vector<NodeId> queue{seed_a};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      for (const auto& n : a.store.neighbors(queue[i], graph::EdgeKind::navigates_to, graph::Direction::out)) {
        if (!depth.count(n)) {
          depth[n] = depth[queue[i]] + 1;
          queue.push_back(n);
        }
      }
    }
    for (const auto& f : da.new_facts) {
      REQUIRE(depth.count(f));
      CHECK(depth[f] <= budget.max_depth);
    }
    for (const auto& [s, t] : da.new_links) CHECK(a.store.has_edge(s, t, graph::EdgeKind::navigates_to));
    Repo20 b;
    auto seed_b = b.scrape("d00");
    options.workers = 1;
    auto db = expand(b.store, {seed_b}, budget, b.spec, b.repo, b.services, options);
    CHECK(to_json(da).dump() == to_json(db).dump());
  }
}

TEST_CASE("live repository parses Atom feeds and is disabled offline") {
  const std::string feed = R"(<?xml version="1.0"?><feed><entry><id>http://arxiv.org/abs/2407.21783v3</id>
    <published>2024-07-31T17:54:27Z</published><title>The Llama 3 Herd
      of Models</title></entry><entry><id>http://arxiv.org/abs/1706.03762v7</id>
    <published>2017-06-12T00:00:00Z</published><title>Attention Is All You Need &amp; More</title></entry></feed>)";
  auto c = LiveRepository::parse_atom(feed);
  REQUIRE(c.size() == 2);
  CHECK(c[0].repo_doc_id == "2407.21783v3");
  CHECK(c[0].title == "The Llama 3 Herd of Models");
  CHECK(c[0].metadata.at("year") == "2024");
  CHECK(c[1].title == "Attention Is All You Need & More");
  setenv("GRAPHY_OFFLINE", "1", 1);
  CHECK(code_of([] { LiveRepository repo(LiveRepositoryConfig{}); }) == ErrorCode::ConfigError);
}

TEST_CASE("live repository rate-limits requests against a local server") {
  const char* old = std::getenv("GRAPHY_OFFLINE");
  std::string saved = old ? old : "";
  unsetenv("GRAPHY_OFFLINE");
  httplib::Server server;
  std::vector<std::chrono::steady_clock::time_point> hits;
  std::mutex m;
  server.Get("/api/query", [&](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(m);
    hits.push_back(std::chrono::steady_clock::now());
    res.set_content("<feed><entry><id>http://x/abs/1</id><title>Only Title</title></entry></feed>", "application/atom+xml");
  });
  server.Get("/pdf/1", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("%PDF-1.4 fake", "application/pdf");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  testing::TempDir cache;
  LiveRepositoryConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port);
  cfg.min_interval = std::chrono::milliseconds(200);
  cfg.cache_dir = cache.path();
  LiveRepository repo(cfg);
  auto hit = resolve_reference(make_reference("Only Title", NodeId::hash_of("s")), repo);
  REQUIRE(hit);
  resolve_reference(make_reference("Only Title", NodeId::hash_of("s")), repo);
  CHECK(hit->document->get().bytes == "%PDF-1.4 fake");
  CHECK(repo.fetch("1").bytes == "%PDF-1.4 fake");  // served from the cache
  server.stop();
  t.join();
  REQUIRE(hits.size() == 2);
  CHECK(hits[1] - hits[0] >= std::chrono::milliseconds(190));
  if (!saved.empty()) setenv("GRAPHY_OFFLINE", saved.c_str(), 1);
}
