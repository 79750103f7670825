#include "graphy/text.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <unordered_set>

namespace graphy::text {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_token_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

bool iequals(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (lower(a[i]) != lower(b[i])) return false;
  }
  return true;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) noexcept {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string current;
  for (char c : s) {
    if (is_token_char(static_cast<unsigned char>(c))) {
      current.push_back(lower(c));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

bool is_stopword(std::string_view token) {
  // Function words plus the imperative vocabulary of extraction queries
  // ("please summarize ... in this paper"), which carries no topic.
  static const std::unordered_set<std::string_view> kStop = {
      "a", "about", "above", "after", "all", "also", "an", "and", "any", "are", "as", "at",
      "be", "been", "being", "between", "both", "but", "by", "can", "could", "describe",
      "did", "do", "does", "each", "extract", "for", "from", "give", "had", "has", "have",
      "how", "i", "identify", "if", "in", "into", "is", "it", "its", "list", "me", "more",
      "most", "my", "no", "not", "of", "on", "or", "other", "our", "paper", "papers",
      "please", "such", "summarise", "summarize", "than", "that", "the", "their", "them",
      "then", "there", "these", "they", "this", "those", "to", "under", "up", "was", "we",
      "were", "what", "when", "where", "which", "while", "who", "why", "will", "with",
      "would", "write", "you", "your"};
  return kStop.contains(token);
}

std::string stem(std::string_view token) {
  std::string t(token);
  if (t.size() > 4 && ends_with(t, "ies")) {
    t.replace(t.size() - 3, 3, "y");
  } else if (t.size() > 3 && ends_with(t, "s") && !ends_with(t, "ss") && !ends_with(t, "us") &&
             !ends_with(t, "is")) {
    t.pop_back();
  }
  if (t.size() > 5 && ends_with(t, "ing")) {
    t.resize(t.size() - 3);
  } else if (t.size() > 4 && ends_with(t, "ed")) {
    t.resize(t.size() - 2);
  }
  return t;
}

std::vector<std::string> content_stems(std::string_view s) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& token : tokenize(s)) {
    if (is_stopword(token)) continue;
    std::string st = stem(token);
    if (seen.insert(st).second) out.push_back(std::move(st));
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    std::string t = trim(current);
    if (!t.empty()) out.push_back(std::move(t));
    current.clear();
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '\n' && i + 1 < s.size() && (s[i + 1] == '\n' || s[i + 1] == '\f')) {
      flush();
      continue;
    }
    if (c == '\f') {
      flush();
      continue;
    }
    current.push_back(c == '\n' || c == '\r' ? ' ' : c);
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == s.size() || is_space(s[i + 1]))) flush();
  }
  flush();
  return out;
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find('\n', start);
    if (end == std::string_view::npos) end = s.size();
    std::string_view line = s.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(line);
    start = end + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string squash(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (!is_space(c)) out.push_back(lower(c));
  }
  return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace graphy::text
