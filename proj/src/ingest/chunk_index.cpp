#include "graphy/ingest/chunk_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "graphy/error.hpp"
#include "graphy/graph/node_id.hpp"

namespace graphy::ingest {

using nlohmann::json;

ChunkIndex ChunkIndex::build(const std::vector<Chunk>& chunks, const providers::Embedder& embedder) {
  if (chunks.empty()) fail(ErrorCode::InvalidParams, "cannot index zero chunks");
  ChunkIndex index;
  index.dimensionality_ = embedder.dimension();
  index.entries_.reserve(chunks.size());
  for (const auto& chunk : chunks) {
    std::vector<double> v;
    try {
      v = embedder.embed(chunk.text);
    } catch (const std::exception& e) {
      fail(ErrorCode::EmbedderFailure, std::string("embedding failed: ") + e.what());
    }
    if (v.size() != index.dimensionality_) {
      fail(ErrorCode::EmbedderFailure, "embedder returned a vector of the wrong dimension");
    }
    double norm = 0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0) || !std::isfinite(norm)) fail(ErrorCode::EmbedderFailure, "embedder returned a zero vector");
    if (std::abs(norm - 1.0) > 1e-12) {
      for (double& x : v) x /= norm;
    }
    index.entries_.push_back(IndexEntry{chunk, std::move(v)});
  }
  return index;
}

std::vector<Chunk> ChunkIndex::retrieve(std::string_view query, std::size_t k,
                                        const providers::Embedder& embedder) const {
  if (k == 0) fail(ErrorCode::InvalidParams, "retrieval k must be at least 1");
  if (entries_.empty()) fail(ErrorCode::EmptyIndex, "chunk index is empty");
  const auto q = embedder.embed(query);
  std::vector<std::pair<double, const IndexEntry*>> scored;
  scored.reserve(entries_.size());
  for (const auto& e : entries_) {
    double dot = 0;
    for (std::size_t i = 0; i < q.size() && i < e.vector.size(); ++i) dot += q[i] * e.vector[i];
    scored.emplace_back(dot, &e);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    if (a.second->chunk.doc_id != b.second->chunk.doc_id) return a.second->chunk.doc_id < b.second->chunk.doc_id;
    return a.second->chunk.index < b.second->chunk.index;
  });
  std::vector<Chunk> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].second->chunk);
  return out;
}

void ChunkIndex::save(const std::filesystem::path& file) const {
  std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write chunk cache " + tmp);
    for (const auto& e : entries_) {
      json line = {{"doc_id", e.chunk.doc_id},
                   {"index", e.chunk.index},
                   {"text", e.chunk.text},
                   {"span", {e.chunk.span.start, e.chunk.span.end}},
                   {"vector", e.vector}};
      out << line.dump() << '\n';
    }
    if (!out) fail(ErrorCode::IoFailure, "cannot write chunk cache " + tmp);
  }
  std::filesystem::rename(tmp, file);
}

ChunkIndex ChunkIndex::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot read chunk cache " + file.string());
  ChunkIndex index;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      IndexEntry e;
      e.chunk.doc_id = j.at("doc_id").get<std::string>();
      e.chunk.index = j.at("index").get<std::size_t>();
      e.chunk.text = j.at("text").get<std::string>();
      e.chunk.span = Span{j.at("span").at(0).get<std::size_t>(), j.at("span").at(1).get<std::size_t>()};
      e.vector = j.at("vector").get<std::vector<double>>();
      if (index.entries_.empty()) index.dimensionality_ = e.vector.size();
      if (e.vector.size() != index.dimensionality_) fail(ErrorCode::IoFailure, "inconsistent vector sizes in cache");
      index.entries_.push_back(std::move(e));
    } catch (const json::exception& e) {
      fail(ErrorCode::IoFailure, std::string("malformed chunk cache: ") + e.what());
    }
  }
  return index;
}

std::filesystem::path ChunkIndex::cache_path(const std::filesystem::path& dir, std::string_view doc_id,
                                             std::string_view embedder_id) {
  std::string key(doc_id);
  key += '\x1f';
  key += embedder_id;
  return dir / (graph::NodeId::hash_of(key).hex() + ".jsonl");
}

ChunkIndex ChunkIndex::build_cached(const std::vector<Chunk>& chunks, const providers::Embedder& embedder,
                                    const std::filesystem::path& cache_dir) {
  if (chunks.empty()) fail(ErrorCode::InvalidParams, "cannot index zero chunks");
  const auto path = cache_path(cache_dir, chunks.front().doc_id, embedder.id());
  if (std::filesystem::exists(path)) {
    try {
      auto cached = load(path);
      bool same = cached.size() == chunks.size() && cached.dimensionality() == embedder.dimension();
      for (std::size_t i = 0; same && i < chunks.size(); ++i) same = cached.entries_[i].chunk == chunks[i];
      if (same) return cached;
    } catch (const Error&) {
      // stale or corrupt cache is rebuilt
    }
  }
  auto built = build(chunks, embedder);
  built.save(path);
  return built;
}

}  // namespace graphy::ingest
