#pragma once

#include <string_view>

#include <json.hpp>

#include "graphy/inspection/workflow.hpp"

namespace graphy::inspection {

/// Section rule: {field: text between the heading and the next heading}.
/// Pattern rule: named captures of the first match, or an array of capture
/// maps for every match when repeat is set. Patterns run in multiline mode
/// ('^'/'$' match at line breaks, '.' does not cross lines).
/// Throws RuleNoMatch, or MalformedConfig for an invalid pattern.
nlohmann::json rule_extract(std::string_view text, const RuleSpec& rule);

/// Heuristic used for section boundaries: numbered headings ("1 Introduction",
/// "2.3 Results", "IV. EVALUATION") and common bare section names.
bool looks_like_heading(std::string_view line);

}  // namespace graphy::inspection
