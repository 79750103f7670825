#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace graphy::ingest {

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

struct Chunk {
  std::string doc_id;
  std::size_t index = 0;
  std::string text;
  Span span;  // byte offsets into the extracted text
  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct ChunkParams {
  std::size_t size = 1200;
  std::size_t overlap = 200;
};

inline constexpr std::size_t kSnapWindow = 40;

/// Splits text into overlapping windows of at most `size` bytes. A chunk end
/// moves back to just after the nearest whitespace within kSnapWindow bytes
/// when one exists; the next chunk starts exactly `overlap` bytes before the
/// previous end. Throws InvalidParams unless 0 <= overlap < size.
std::vector<Chunk> chunk_text(std::string_view text, std::size_t size, std::size_t overlap,
                              std::string_view doc_id = {});

inline std::vector<Chunk> chunk_text(std::string_view text, const ChunkParams& params,
                                     std::string_view doc_id = {}) {
  return chunk_text(text, params.size, params.overlap, doc_id);
}

}  // namespace graphy::ingest
