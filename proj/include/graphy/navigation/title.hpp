#pragma once

#include <string>
#include <string_view>

#include "graphy/graph/node_id.hpp"

namespace graphy::navigation {

/// Lowercase, ASCII punctuation removed, whitespace runs collapsed to one space, trimmed.
std::string normalize_title(std::string_view title);

/// Hash of the normalized title. Throws EmptyTitle.
graph::NodeId canonical_id(std::string_view title);

/// 1 - levenshtein / max length, over normalized titles; 1.0 for two empty strings.
double title_similarity(std::string_view normalized_a, std::string_view normalized_b);

}  // namespace graphy::navigation
