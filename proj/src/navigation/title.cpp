#include "graphy/navigation/title.hpp"

#include <algorithm>
#include <cctype>

#include "graphy/error.hpp"
#include "graphy/text.hpp"

namespace graphy::navigation {

std::string normalize_title(std::string_view title) {
  std::string out;
  out.reserve(title.size());
  bool pending_space = false;
  for (unsigned char c : title) {
    if (c < 0x80 && std::ispunct(c)) continue;
    if (c < 0x80 && std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
  }
  return out;
}

graph::NodeId canonical_id(std::string_view title) {
  const std::string normalized = normalize_title(title);
  if (normalized.empty()) fail(ErrorCode::EmptyTitle, "title is empty after normalization");
  return graph::NodeId::hash_of(normalized);
}

double title_similarity(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(text::levenshtein(a, b)) / static_cast<double>(longest);
}

}  // namespace graphy::navigation
