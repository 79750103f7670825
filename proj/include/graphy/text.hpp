#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small ASCII-oriented text helpers shared by the offline providers,
// reference matching and generation fallbacks.
namespace graphy::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool starts_with_ci(std::string_view s, std::string_view prefix) noexcept;

/// Lowercased runs of ASCII letters/digits; non-ASCII bytes are kept inside tokens.
std::vector<std::string> tokenize(std::string_view s);

bool is_stopword(std::string_view token);

/// Light suffix stripper: "challenges" -> "challenge", "studies" -> "study".
std::string stem(std::string_view token);

/// Stems of the non-stopword tokens, in order of first appearance, deduplicated.
std::vector<std::string> content_stems(std::string_view s);

/// Splits on sentence punctuation followed by whitespace and on blank lines.
std::vector<std::string> split_sentences(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Lowercase and drop ASCII whitespace: the comparison form used by
/// "contains" filters ("Llama3" matches "The Llama 3 Herd").
std::string squash(std::string_view s);

std::size_t levenshtein(std::string_view a, std::string_view b);

}  // namespace graphy::text
