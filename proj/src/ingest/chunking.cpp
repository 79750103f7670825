#include "graphy/ingest/chunking.hpp"

#include "graphy/error.hpp"

namespace graphy::ingest {

namespace {

bool is_space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

bool is_continuation(std::string_view text, std::size_t pos) {
  return pos < text.size() && (static_cast<unsigned char>(text[pos]) & 0xC0) == 0x80;
}

}  // namespace

std::vector<Chunk> chunk_text(std::string_view text, std::size_t size, std::size_t overlap,
                              std::string_view doc_id) {
  if (size == 0 || overlap >= size) {
    fail(ErrorCode::InvalidParams, "chunking requires 0 <= overlap < size");
  }
  std::vector<Chunk> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = start + size;
    if (end >= text.size()) {
      end = text.size();
    } else {
      // Snap back to just after whitespace, keeping the next start ahead of this one.
      std::size_t floor = std::max(start + overlap + 1, end > kSnapWindow ? end - kSnapWindow : 0);
      for (std::size_t b = end; b > floor; --b) {
        if (is_space(text[b - 1])) {
          end = b;
          break;
        }
      }
      while (end > start + overlap + 1 && is_continuation(text, end)) --end;
    }
    out.push_back(Chunk{std::string(doc_id), out.size(), std::string(text.substr(start, end - start)),
                        Span{start, end}});
    if (end == text.size()) break;
    start = end - overlap;
  }
  return out;
}

}  // namespace graphy::ingest
