#include <doctest.h>

#include <algorithm>
#include <set>
#include <fstream>
#include <functional>
#include <sstream>

#include "graphy/error.hpp"
#include "graphy/graph/export.hpp"
#include "graphy/graph/graph_store.hpp"
#include "graphy/text.hpp"
#include "graphy/navigation/title.hpp"
#include "support.hpp"

using namespace graphy;
using namespace graphy::graph;
using graphy::testing::Rng;
using graphy::testing::TempDir;

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

NodeId paper(GraphStore& store, const std::string& title) {
  auto id = navigation::canonical_id(title);
  store.upsert_fact(id, "Paper", {{"title", title}});
  return id;
}

std::multiset<std::string> node_multiset(const GraphStore& s) {
  std::multiset<std::string> out;
  for (const auto& n : s.nodes()) {
    out.insert(n.id.hex() + "|" + n.label + "|" + to_json(n.properties).dump() + "|" + (n.owner ? n.owner->hex() : ""));
  }
  return out;
}

std::multiset<std::string> edge_multiset(const GraphStore& s) {
  std::multiset<std::string> out;
  for (const auto& e : s.edges()) {
    out.insert(std::string(to_string(e.kind)) + "|" + e.source.hex() + "|" + e.target.hex() + "|" +
               to_json(e.properties).dump());
  }
  return out;
}

}  // namespace

TEST_CASE("node ids are 32 hex chars and stable") {
  auto a = NodeId::hash_of("x");
  CHECK(a.hex().size() == 32);
  CHECK(a == NodeId::hash_of("x"));
  CHECK(a != NodeId::hash_of("y"));
  CHECK(NodeId::from_hex(a.hex()) == a);
  CHECK(code_of([] { NodeId::from_hex("zz"); }) == ErrorCode::InvalidParams);
}

TEST_CASE("upsert_fact stores the Llama paper under its canonical id") {
  GraphStore store;
  testing::declare_paper_schema(store);
  auto id = store.upsert_fact(navigation::canonical_id("The Llama 3 Herd of Models"), "Paper",
                              {{"title", std::string("The Llama 3 Herd of Models")}});
  CHECK(id == navigation::canonical_id("the llama 3 herd of models!"));
  CHECK(store.node_count() == 1);
  store.upsert_fact(id, "Paper", {{"title", std::string("The Llama 3 Herd of Models")}});
  CHECK(store.node_count() == 1);
}

TEST_CASE("upsert merges properties with new values winning") {
  GraphStore store;
  testing::declare_paper_schema(store);
  auto id = paper(store, "A");
  store.upsert_fact(id, "Paper", {{"title", std::string("A")}, {"year", std::int64_t{2020}}});
  store.upsert_fact(id, "Paper", {{"title", std::string("A")}, {"year", std::int64_t{2021}}, {"citation_count", std::int64_t{3}}});
  auto n = store.get(id);
  CHECK(std::get<std::int64_t>(n.properties.at("year")) == 2021);
  CHECK(std::get<std::int64_t>(n.properties.at("citation_count")) == 3);
}

TEST_CASE("schema violations are rejected") {
  GraphStore store;
  testing::declare_paper_schema(store);
  auto id = navigation::canonical_id("A");
  CHECK(code_of([&] { store.upsert_fact(id, "Paper", {{"title", std::string("A")}, {"year", std::string("2023")}}); }) ==
        ErrorCode::SchemaViolation);
  CHECK(code_of([&] { store.upsert_fact(id, "Paper", {{"year", std::int64_t{2023}}}); }) == ErrorCode::SchemaViolation);
  CHECK(code_of([&] { store.upsert_fact(id, "Nope", {{"title", std::string("A")}}); }) == ErrorCode::SchemaViolation);
  CHECK(code_of([&] { store.upsert_fact(id, "Paper", {{"title", std::string("A")}, {"venue", std::string("x")}}); }) ==
        ErrorCode::SchemaViolation);
  CHECK(store.node_count() == 0);
}

TEST_CASE("declared value types never change") {
  GraphStore store;
  testing::declare_paper_schema(store);
  LabelSchema conflicting(NodeKind::fact);
  conflicting.add("year", ValueType::text);
  CHECK(code_of([&] { store.declare_label("Paper", conflicting); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("add_dimensions creates one node and one edge per item") {
  GraphStore store;
  testing::declare_paper_schema(store);
  auto p = paper(store, "P");
  auto ids = store.add_dimensions(p, "Challenge",
                                  {{{"summary", std::string("a")}}, {{"summary", std::string("b")}}, {{"summary", std::string("c")}}});
  CHECK(ids.size() == 3);
  CHECK(store.node_count() == 4);
  CHECK(store.edge_count() == 3);
  auto dims = store.dimensions_of(p, "Challenge");
  REQUIRE(dims.size() == 3);
  CHECK(std::get<std::string>(dims[0].properties.at("summary")) == "a");
  CHECK(std::get<std::string>(dims[2].properties.at("summary")) == "c");
  for (const auto& id : ids) CHECK(store.neighbors(id, EdgeKind::has_dimension, Direction::in) == std::vector<NodeId>{p});
  CHECK(store.add_dimensions(p, "Challenge", {}).empty());
  CHECK(store.node_count() == 4);
}

TEST_CASE("add_dimensions error cases") {
  GraphStore store;
  testing::declare_paper_schema(store);
  CHECK(code_of([&] { store.add_dimensions(NodeId::hash_of("missing"), "Challenge", {{{"summary", std::string("a")}}}); }) ==
        ErrorCode::UnknownOwner);
  auto p = paper(store, "P");
  auto d = store.add_dimensions(p, "Challenge", {{{"summary", std::string("a")}}});
  CHECK(code_of([&] { store.add_dimensions(d[0], "Challenge", {{{"summary", std::string("b")}}}); }) == ErrorCode::UnknownOwner);
  CHECK(code_of([&] { store.add_dimensions(p, "Challenge", {{{"summary", std::int64_t{1}}}}); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("identical challenges of two papers stay separate nodes") {
  GraphStore store;
  testing::declare_paper_schema(store);
  auto a = paper(store, "A");
  auto b = paper(store, "B");
  auto da = store.add_dimensions(a, "Challenge", {{{"summary", std::string("same")}}});
  auto db = store.add_dimensions(b, "Challenge", {{{"summary", std::string("same")}}});
  CHECK(da[0] != db[0]);
}

TEST_CASE("link_facts is idempotent and kind-checked") {
  GraphStore store;
  testing::declare_paper_schema(store);
  auto p1 = paper(store, "P1");
  auto p2 = paper(store, "P2");
  store.link_facts(p1, p2);
  store.link_facts(p1, p2);
  CHECK(store.edge_count() == 1);
  auto d = store.add_dimensions(p1, "Challenge", {{{"summary", std::string("x")}}});
  CHECK(code_of([&] { store.link_facts(p1, d[0]); }) == ErrorCode::KindViolation);
  CHECK(code_of([&] { store.link_facts(p1, NodeId::hash_of("nope")); }) == ErrorCode::UnknownNode);
}

TEST_CASE("replaying a 20-paper citation list yields the distinct pair count") {
  GraphStore store;
  testing::declare_paper_schema(store);
  std::vector<NodeId> ids;
  for (int i = 0; i < 20; ++i) ids.push_back(paper(store, "Paper " + std::to_string(i)));
  Rng rng(7);
  std::set<std::pair<NodeId, NodeId>> oracle;
  for (int i = 0; i < 120; ++i) {
    auto s = ids[rng.index(20)];
    auto t = ids[rng.index(20)];
    store.link_facts(s, t);
    oracle.insert({s, t});
  }
  CHECK(store.edge_count() == oracle.size());
}

TEST_CASE("neighbors are sorted and respect direction") {
  GraphStore store;
  testing::declare_paper_schema(store);
  auto p1 = paper(store, "P1");
  auto p2 = paper(store, "P2");
  auto p3 = paper(store, "P3");
  CHECK(store.neighbors(p1, EdgeKind::navigates_to, Direction::out).empty());
  store.link_facts(p1, p3);
  store.link_facts(p1, p2);
  auto expected = std::vector<NodeId>{p2, p3};
  std::sort(expected.begin(), expected.end());
  CHECK(store.neighbors(p1, EdgeKind::navigates_to, Direction::out) == expected);
  auto both = store.neighbors(p2, EdgeKind::navigates_to, Direction::both);
  CHECK(std::find(both.begin(), both.end(), p1) != both.end());
  CHECK(code_of([&] { store.neighbors(NodeId::hash_of("x"), EdgeKind::navigates_to, Direction::out); }) ==
        ErrorCode::UnknownNode);
}

TEST_CASE("property: neighbors equal a brute-force edge filter on 200 random graphs") {
  Rng rng(20240501);
  for (int round = 0; round < 200; ++round) {
    GraphStore store;
    testing::declare_paper_schema(store);
    const std::size_t n = 1 + rng.index(500);
    std::vector<NodeId> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(paper(store, "p" + std::to_string(round) + "-" + std::to_string(i)));
    const std::size_t m = rng.index(3 * n + 1);
    for (std::size_t i = 0; i < m; ++i) store.link_facts(ids[rng.index(n)], ids[rng.index(n)]);
    if (rng.chance(0.5)) store.add_dimensions(ids[rng.index(n)], "Challenge", {{{"summary", std::string("c")}}});
    const auto edges = store.edges();
    for (int probe = 0; probe < 5; ++probe) {
      const auto& id = ids[rng.index(n)];
      for (auto kind : kAllEdgeKinds) {
        for (auto dir : {Direction::out, Direction::in, Direction::both}) {
          std::set<NodeId> oracle;
          for (const auto& e : edges) {
            if (e.kind != kind) continue;
            if ((dir == Direction::out || dir == Direction::both) && e.source == id) oracle.insert(e.target);
            if ((dir == Direction::in || dir == Direction::both) && e.target == id) oracle.insert(e.source);
          }
          auto got = store.neighbors(id, kind, dir);
          REQUIRE(got == std::vector<NodeId>(oracle.begin(), oracle.end()));
        }
      }
    }
  }
}

TEST_CASE("scan filters by label and predicate") {
  GraphStore store;
  auto demo = testing::build_demo_graph(store);
  auto llama3 = store.scan("Paper", [](const Node& n) {
    auto it = n.properties.find("title");
    return it != n.properties.end() && text::squash(std::get<std::string>(it->second)).find("llama3") != std::string::npos;
  });
  CHECK(llama3.size() == 2);
  CHECK(store.scan("Paper").size() == 9);
  auto y2023 = store.scan("Paper", [](const Node& n) {
    auto it = n.properties.find("year");
    return it != n.properties.end() && std::get<std::int64_t>(it->second) == 2023;
  });
  CHECK(y2023.size() == 1);
  CHECK(code_of([&] { store.scan("Nope"); }) == ErrorCode::UnknownLabel);
  (void)demo;
}

TEST_CASE("dimensions are leaves in every random build") {
  Rng rng(99);
  for (int round = 0; round < 50; ++round) {
    GraphStore store;
    testing::declare_paper_schema(store);
    std::vector<NodeId> facts;
    for (int i = 0; i < 15; ++i) facts.push_back(paper(store, "f" + std::to_string(i)));
    for (int i = 0; i < 40; ++i) {
      switch (rng.index(3)) {
        case 0: store.link_facts(facts[rng.index(15)], facts[rng.index(15)]); break;
        case 1: store.add_dimensions(facts[rng.index(15)], "Challenge", {{{"summary", rng.word()}}}); break;
        default:
          try {
            auto all = store.nodes();
            store.link_facts(facts[rng.index(15)], all[rng.index(all.size())].id);
          } catch (const Error&) {
          }
      }
    }
    for (const auto& e : store.edges()) {
      if (e.kind != EdgeKind::has_dimension) continue;
      CHECK(store.neighbors(e.target, EdgeKind::navigates_to, Direction::out).empty());
      CHECK(store.neighbors(e.target, EdgeKind::has_dimension, Direction::out).empty());
    }
  }
}

TEST_CASE("jsonl export and import round trip") {
  GraphStore store;
  testing::build_demo_graph(store);
  TempDir dir;
  auto files = export_graph(store, ExportFormat::jsonl, dir.path());
  REQUIRE(files.size() == 1);
  GraphStore copy;
  import_jsonl(copy, files[0]);
  CHECK(node_multiset(copy) == node_multiset(store));
  CHECK(edge_multiset(copy) == edge_multiset(store));
  std::ostringstream a, b;
  store.write_jsonl(a);
  copy.write_jsonl(b);
  CHECK(a.str() == b.str());
}

TEST_CASE("csv export writes one vertex file per label and one edge file per kind") {
  GraphStore store;
  LabelSchema paper_schema(NodeKind::fact);
  paper_schema.add("title", ValueType::text, true).add("tags", ValueType::text_list);
  store.declare_label("Paper", paper_schema);
  LabelSchema challenge(NodeKind::dimension);
  challenge.add("summary", ValueType::text, true);
  store.declare_label("Challenge", challenge);
  auto p = navigation::canonical_id("A, \"quoted\" title");
  store.upsert_fact(p, "Paper", {{"title", std::string("A, \"quoted\" title")}, {"tags", TextList{"x", "y"}}});
  store.add_dimensions(p, "Challenge", {{{"summary", std::string("s")}}});
  TempDir dir;
  auto files = export_graph(store, ExportFormat::csv_import, dir.path());
  int vertex = 0, edge = 0;
  for (const auto& f : files) {
    auto name = f.filename().string();
    if (name.rfind("vertex_", 0) == 0) ++vertex;
    if (name.rfind("edge_", 0) == 0) ++edge;
  }
  CHECK(vertex == 2);
  CHECK(edge == 2);
  auto paper_csv = testing::read_file(dir.path() / "vertex_Paper.csv");
  CHECK(paper_csv.rfind("id,", 0) == 0);
  CHECK(paper_csv.find("\"A, \"\"quoted\"\" title\"") != std::string::npos);
  CHECK(paper_csv.find("x;y") != std::string::npos);
  auto edge_csv = testing::read_file(dir.path() / "edge_HAS_DIMENSION.csv");
  CHECK(edge_csv.rfind("source,target", 0) == 0);
}

TEST_CASE("empty graph exports header-only files") {
  GraphStore store;
  testing::declare_paper_schema(store);
  TempDir dir;
  export_graph(store, ExportFormat::csv_import, dir.path());
  auto content = testing::read_file(dir.path() / "vertex_Paper.csv");
  CHECK(std::count(content.begin(), content.end(), '\n') == 1);
  auto nav = testing::read_file(dir.path() / "edge_NAVIGATES_TO.csv");
  CHECK(std::count(nav.begin(), nav.end(), '\n') == 1);
  auto jfiles = export_graph(GraphStore{}, ExportFormat::jsonl, dir.path() / "j");
  CHECK(testing::read_file(jfiles[0]).empty());
}

TEST_CASE("persistent store replays its log and compacts") {
  TempDir dir;
  std::multiset<std::string> before_nodes, before_edges;
  {
    GraphStore store(dir.path());
    testing::build_demo_graph(store);
    before_nodes = node_multiset(store);
    before_edges = edge_multiset(store);
  }
  CHECK(std::filesystem::exists(dir.path() / "snapshot.jsonl"));
  {
    GraphStore reopened(dir.path());
    CHECK(node_multiset(reopened) == before_nodes);
    CHECK(edge_multiset(reopened) == before_edges);
    reopened.upsert_fact(navigation::canonical_id("Late"), "Paper", {{"title", std::string("Late")}});
  }
  GraphStore again(dir.path());
  CHECK(again.contains(navigation::canonical_id("Late")));
}

TEST_CASE("operation log survives a crash without close") {
  TempDir dir;
  TempDir copy;
  auto* store = new GraphStore(dir.path());
  testing::declare_paper_schema(*store);
  auto id = paper(*store, "Durable");
  // Simulate a crash: copy the on-disk state before the destructor compacts.
  std::filesystem::copy(dir.path(), copy.path(), std::filesystem::copy_options::recursive);
  delete store;
  GraphStore recovered(copy.path());
  CHECK(recovered.contains(id));
}

TEST_CASE("torn final log line is ignored") {
  TempDir dir;
  TempDir torn;
  {
    GraphStore store(dir.path());
    testing::declare_paper_schema(store);
    paper(store, "Kept");
    std::filesystem::copy(dir.path(), torn.path(), std::filesystem::copy_options::recursive);
  }
  {
    std::ofstream log(torn.path() / "ops.log", std::ios::app);
    log << "{\"op\":\"upsert_fact\",\"id\":";
  }
  GraphStore recovered(torn.path());
  CHECK(recovered.contains(navigation::canonical_id("Kept")));
  CHECK(recovered.node_count() == 1);
}

TEST_CASE("applying the same operation log twice equals applying it once") {
  GraphStore a;
  testing::build_demo_graph(a);
  GraphStore b;
  testing::build_demo_graph(b);
  testing::build_demo_graph(b);
  CHECK(node_multiset(a) == node_multiset(b));
  CHECK(edge_multiset(a) == edge_multiset(b));
}
