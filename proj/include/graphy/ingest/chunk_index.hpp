#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphy/ingest/chunking.hpp"
#include "graphy/providers/embedder.hpp"

namespace graphy::ingest {

struct IndexEntry {
  Chunk chunk;
  std::vector<double> vector;
};

/// Immutable per-document vector store.
class ChunkIndex {
 public:
  /// Throws InvalidParams on empty input, EmbedderFailure if embedding fails.
  static ChunkIndex build(const std::vector<Chunk>& chunks, const providers::Embedder& embedder);

  /// Top-k entries by dot product, ties by (doc_id, index). Throws EmptyIndex, InvalidParams.
  std::vector<Chunk> retrieve(std::string_view query, std::size_t k,
                              const providers::Embedder& embedder) const;

  const std::vector<IndexEntry>& entries() const noexcept { return entries_; }
  std::size_t dimensionality() const noexcept { return dimensionality_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Cache file: one JSON object per line {doc_id, index, text, span, vector}.
  void save(const std::filesystem::path& file) const;
  static ChunkIndex load(const std::filesystem::path& file);

  /// Cache location for (doc_id, embedder id) under `dir`.
  static std::filesystem::path cache_path(const std::filesystem::path& dir, std::string_view doc_id,
                                          std::string_view embedder_id);

  /// Loads the cache when present and matching `chunks`, otherwise builds and writes it.
  static ChunkIndex build_cached(const std::vector<Chunk>& chunks, const providers::Embedder& embedder,
                                 const std::filesystem::path& cache_dir);

 private:
  std::vector<IndexEntry> entries_;
  std::size_t dimensionality_ = 0;
};

}  // namespace graphy::ingest
