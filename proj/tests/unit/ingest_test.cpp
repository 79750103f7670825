#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "graphy/error.hpp"
#include "graphy/ingest/chunk_index.hpp"
#include "graphy/ingest/chunking.hpp"
#include "graphy/ingest/document.hpp"
#include "graphy/providers/embedder.hpp"
#include "support.hpp"

using namespace graphy;
using namespace graphy::ingest;
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

// Rebuilds the text from chunks using only spans, then checks every byte is covered.
void check_chunk_invariants(const std::string& text, const std::vector<Chunk>& chunks, std::size_t size,
                            std::size_t overlap) {
  if (text.empty()) {
    CHECK(chunks.empty());
    return;
  }
  REQUIRE(!chunks.empty());
  std::vector<int> covered(text.size(), 0);
  std::string rebuilt;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    const auto& c = chunks[i];
    CHECK(c.index == i);
    CHECK(c.text == text.substr(c.span.start, c.span.end - c.span.start));
    CHECK(c.span.end - c.span.start <= size);
    for (std::size_t b = c.span.start; b < c.span.end; ++b) covered[b] = 1;
    if (i == 0) {
      CHECK(c.span.start == 0);
      rebuilt = c.text;
    } else {
      const auto& prev = chunks[i - 1];
      CHECK(c.span.start >= prev.span.start);
      CHECK(prev.span.end - c.span.start == overlap);
      rebuilt += c.text.substr(overlap);
    }
  }
  CHECK(chunks.back().span.end == text.size());
  CHECK(rebuilt == text);
  CHECK(std::all_of(covered.begin(), covered.end(), [](int v) { return v == 1; }));
}

}  // namespace

TEST_CASE("plaintext extraction is the identity") {
  RawDocument doc{"d", DocumentKind::plaintext, "hello", ""};
  auto t = extract_text(doc);
  CHECK(t.text == "hello");
  CHECK(t.metadata.empty());
}

TEST_CASE("structured json joins title and body") {
  RawDocument doc{"d", DocumentKind::structured_json, R"({"title":"T","body":"B"})", ""};
  auto t = extract_text(doc);
  CHECK(t.text == "T\n\nB");
  CHECK(t.metadata == std::map<std::string, std::string>{{"title", "T"}});
  RawDocument bad{"d", DocumentKind::structured_json, "[1,2]", ""};
  CHECK(code_of([&] { extract_text(bad); }) == ErrorCode::CorruptDocument);
}

TEST_CASE("pdf extraction reads text layer in page order") {
  for (const char* name : {"docs/plain.pdf", "docs/flate.pdf"}) {
    auto doc = load_document(testing::fixture_path(name));
    CHECK(doc.kind == DocumentKind::pdf);
    auto t = extract_text(doc);
    CHECK(t.metadata.at("page_count") == "2");
    auto first = t.text.find("Graph Retrieval for Literature");
    auto abstract = t.text.find("We study (progressive) exploration.");
    auto page_break = t.text.find('\f');
    auto second = t.text.find("Second page text.");
    CHECK(first == 0);
    CHECK(abstract != std::string::npos);
    CHECK(page_break != std::string::npos);
    CHECK(abstract < page_break);
    CHECK(page_break < second);
    CHECK(second != std::string::npos);
  }
}

TEST_CASE("empty or broken pdf is corrupt") {
  CHECK(code_of([] { extract_text(RawDocument{"d", DocumentKind::pdf, "", ""}); }) == ErrorCode::CorruptDocument);
  CHECK(code_of([] { extract_text(RawDocument{"d", DocumentKind::pdf, "%PDF-1.4\n%%EOF", ""}); }) ==
        ErrorCode::CorruptDocument);
  CHECK(code_of([] { extract_text(RawDocument{"d", DocumentKind::pdf, "not a pdf", ""}); }) == ErrorCode::CorruptDocument);
}

TEST_CASE("load_document reports missing files") {
  CHECK(code_of([] { load_document("/nonexistent/file.txt"); }) == ErrorCode::IoFailure);
}

TEST_CASE("short text is a single chunk") {
  auto chunks = chunk_text("short text", 1200, 200, "d");
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0].text == "short text");
  CHECK(chunks[0].span == Span{0, 10});
}

TEST_CASE("2500 chars with size 1000 and overlap 200 gives 3 chunks") {
  Rng rng(1);
  std::string text;
  while (text.size() < 2500) text += rng.word(2, 9) + " ";
  text.resize(2500);
  auto chunks = chunk_text(text, 1000, 200, "d");
  CHECK(chunks.size() == 3);
  check_chunk_invariants(text, chunks, 1000, 200);
  // Without whitespace nothing snaps, so starts advance by exactly size - overlap.
  std::string solid(2500, 'x');
  auto plain = chunk_text(solid, 1000, 200, "d");
  REQUIRE(plain.size() == 3);
  CHECK(plain[1].span.start == 800);
  CHECK(plain[2].span.start == 1600);
}

TEST_CASE("chunk ends snap back to whitespace within 40 chars") {
  std::string text(990, 'a');
  text += ' ';
  text += std::string(1500, 'b');
  auto chunks = chunk_text(text, 1000, 200, "d");
  CHECK(chunks[0].span.end == 991);
  std::string far(900, 'a');
  far += ' ';
  far += std::string(1500, 'b');
  CHECK(chunk_text(far, 1000, 200, "d")[0].span.end == 1000);
}

TEST_CASE("chunking rejects overlap >= size") {
  CHECK(code_of([] { chunk_text("abc", 100, 100); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { chunk_text("abc", 0, 0); }) == ErrorCode::InvalidParams);
}

TEST_CASE("property: chunk coverage, exact overlap and determinism") {
  Rng rng(42);
  for (int round = 0; round < 300; ++round) {
    std::string text;
    const std::size_t target = rng.index(6000);
    while (text.size() < target) {
      text += rng.chance(0.1) ? std::string("\xC3\xA9") : rng.word(1, 12);
      text += rng.chance(0.05) ? "\n" : " ";
    }
    const std::size_t size = 20 + rng.index(1500);
    const std::size_t overlap = rng.index(size);
    auto chunks = chunk_text(text, size, overlap, "doc");
    check_chunk_invariants(text, chunks, size, overlap);
    CHECK(chunks == chunk_text(text, size, overlap, "doc"));
  }
}

TEST_CASE("hash embedder buckets 'a a b' by hand") {
  providers::HashEmbedder e;
  auto v = e.embed("a a b");
  REQUIRE(v.size() == 64);
  // FNV-1a 64: "a" -> bucket 12, "b" -> bucket 37 (worked out by hand).
  CHECK(std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; }) == 2);
  CHECK(v[12] == doctest::Approx(2.0 / std::sqrt(5.0)));
  CHECK(v[37] == doctest::Approx(1.0 / std::sqrt(5.0)));
  CHECK(e.embed("a a b") == v);
  CHECK(code_of([&] { e.embed(""); }) == ErrorCode::ProviderFailure);
}

TEST_CASE("hash embedder output is unit norm") {
  providers::HashEmbedder e;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    auto text = rng.chance(0.1) ? std::string("!!! ???") : rng.sentence(1 + rng.index(30));
    auto v = e.embed(text);
    double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    CHECK(std::abs(n - 1.0) <= 1e-9);
  }
}

namespace {

std::vector<Chunk> ten_chunk_fixture() {
  const char* texts[] = {
      "The main challenges are scale and noise.",
      "We describe the system architecture.",
      "Challenges include supernodes with many neighbors.",
      "Results show a large speedup.",
      "Related work covers retrieval augmented generation.",
      "A key challenge is hallucination in summaries.",
      "The user interface has three canvases.",
      "We thank the reviewers.",
      "Future work addresses open challenges in evaluation.",
      "Experiments use twenty documents.",
  };
  std::vector<Chunk> chunks;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    std::string t = texts[i];
    chunks.push_back(Chunk{"fixture", i, t, Span{offset, offset + t.size()}});
    offset += t.size();
  }
  return chunks;
}

// Exhaustive cosine ranking computed without the index.
std::vector<std::size_t> oracle_rank(const std::vector<Chunk>& chunks, const std::string& query,
                                     const providers::Embedder& e) {
  auto q = e.embed(query);
  std::vector<double> scores;
  for (const auto& c : chunks) {
    auto v = e.embed(c.text);
    double dot = 0, nq = 0, nv = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      dot += q[i] * v[i];
      nq += q[i] * q[i];
      nv += v[i] * v[i];
    }
    scores.push_back(dot / std::sqrt(nq * nv));
  }
  std::vector<std::size_t> order(chunks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (std::abs(scores[a] - scores[b]) > 1e-12) return scores[a] > scores[b];
    if (chunks[a].doc_id != chunks[b].doc_id) return chunks[a].doc_id < chunks[b].doc_id;
    return chunks[a].index < chunks[b].index;
  });
  return order;
}

}  // namespace

TEST_CASE("build_index embeds every chunk with unit norm") {
  providers::HashEmbedder e;
  auto chunks = ten_chunk_fixture();
  std::vector<Chunk> three(chunks.begin(), chunks.begin() + 3);
  CHECK(ChunkIndex::build(three, e).size() == 3);
  auto index = ChunkIndex::build(chunks, e);
  CHECK(index.dimensionality() == 64);
  for (const auto& entry : index.entries()) {
    double n = std::sqrt(std::inner_product(entry.vector.begin(), entry.vector.end(), entry.vector.begin(), 0.0));
    CHECK(std::abs(n - 1.0) <= 1e-9);
  }
  auto same = ChunkIndex::build({Chunk{"x", 0, "same", {}}, Chunk{"x", 1, "same", {}}}, e);
  CHECK(same.entries()[0].vector == same.entries()[1].vector);
  CHECK(code_of([&] { ChunkIndex::build({}, e); }) == ErrorCode::InvalidParams);
}

TEST_CASE("retrieve matches the exhaustive oracle on the 10-chunk fixture") {
  providers::HashEmbedder e;
  auto chunks = ten_chunk_fixture();
  auto index = ChunkIndex::build(chunks, e);
  auto got = index.retrieve("challenges", 10, e);
  auto oracle = oracle_rank(chunks, "challenges", e);
  REQUIRE(got.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(got[i].index == oracle[i]);
  CHECK(got[0].text.find("hallenges") != std::string::npos);
  CHECK(index.retrieve("challenges", 3, e).size() == 3);
  CHECK(index.retrieve("challenges", 50, e).size() == 10);
}

TEST_CASE("a chunk's own text ranks it first") {
  providers::HashEmbedder e;
  auto chunks = ten_chunk_fixture();
  auto index = ChunkIndex::build(chunks, e);
  for (const auto& c : chunks) CHECK(index.retrieve(c.text, 1, e)[0].index == c.index);
}

TEST_CASE("retrieve errors") {
  providers::HashEmbedder e;
  ChunkIndex empty;
  CHECK(code_of([&] { empty.retrieve("q", 1, e); }) == ErrorCode::EmptyIndex);
  auto index = ChunkIndex::build(ten_chunk_fixture(), e);
  CHECK(code_of([&] { index.retrieve("q", 0, e); }) == ErrorCode::InvalidParams);
}

TEST_CASE("property: retrieve equals a full-scan argsort on 200 random indexes") {
  providers::HashEmbedder e(16);  // few buckets so ties occur
  Rng rng(77);
  for (int round = 0; round < 200; ++round) {
    std::vector<Chunk> chunks;
    const std::size_t n = 1 + rng.index(40);
    for (std::size_t i = 0; i < n; ++i) {
      chunks.push_back(Chunk{rng.chance(0.5) ? "a" : "b", i, rng.sentence(1 + rng.index(6)), {}});
    }
    auto index = ChunkIndex::build(chunks, e);
    const auto query = rng.sentence(1 + rng.index(3));
    const std::size_t k = 1 + rng.index(n + 3);
    auto got = index.retrieve(query, k, e);
    auto oracle = oracle_rank(chunks, query, e);
    REQUIRE(got.size() == std::min(k, n));
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].doc_id == chunks[oracle[i]].doc_id);
      CHECK(got[i].index == chunks[oracle[i]].index);
    }
  }
}

TEST_CASE("chunk cache round trips and is keyed by doc and embedder") {
  testing::TempDir dir;
  providers::HashEmbedder e;
  auto chunks = ten_chunk_fixture();
  auto built = ChunkIndex::build_cached(chunks, e, dir.path());
  auto path = ChunkIndex::cache_path(dir.path(), "fixture", e.id());
  CHECK(std::filesystem::exists(path));
  CHECK(path != ChunkIndex::cache_path(dir.path(), "fixture", "other"));
  auto line = testing::read_file(path).substr(0, testing::read_file(path).find('\n'));
  auto j = nlohmann::json::parse(line);
  for (const char* key : {"doc_id", "index", "text", "span", "vector"}) CHECK(j.contains(key));
  auto loaded = ChunkIndex::load(path);
  REQUIRE(loaded.size() == built.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded.entries()[i].chunk == built.entries()[i].chunk);
    CHECK(loaded.entries()[i].vector == built.entries()[i].vector);
  }
}
