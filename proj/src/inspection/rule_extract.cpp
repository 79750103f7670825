#include "graphy/inspection/rule_extract.hpp"

#include <set>

#include <boost/regex.hpp>

#include "graphy/error.hpp"
#include "graphy/text.hpp"

namespace graphy::inspection {

using nlohmann::json;

namespace {

const std::set<std::string>& bare_headings() {
  static const std::set<std::string> kHeadings = {
      "abstract",     "introduction", "background", "related work", "method",       "methods",
      "methodology",  "approach",     "experiments", "experiment",  "evaluation",   "results",
      "discussion",   "conclusion",   "conclusions", "references",  "bibliography", "acknowledgments",
      "acknowledgements", "appendix", "keywords",   "index terms", "limitations",  "future work",
      "preliminaries", "problem statement", "overview", "demonstration", "system overview"};
  return kHeadings;
}

std::string strip_numbering(std::string_view line) {
  static const boost::regex kNumber(R"(^(?:\d+(?:\.\d+)*\.?|[IVXLC]+\.)\s+)");
  std::string s(line);
  boost::smatch m;
  if (boost::regex_search(s, m, kNumber)) s = m.suffix().str();
  return s;
}

std::string heading_key(std::string_view line) {
  std::string s = text::trim(strip_numbering(text::trim(line)));
  while (!s.empty() && (s.back() == ':' || s.back() == '.')) s.pop_back();
  return text::to_lower(text::trim(s));
}

// Translates Python-style named groups to the Perl form Boost understands.
std::string translate_pattern(std::string pattern) {
  std::string::size_type pos = 0;
  while ((pos = pattern.find("(?P<", pos)) != std::string::npos) {
    pattern.erase(pos + 2, 1);
    pos += 3;
  }
  return pattern;
}

std::vector<std::string> group_names(const std::string& pattern) {
  std::vector<std::string> names;
  for (std::string::size_type pos = 0; (pos = pattern.find("(?<", pos)) != std::string::npos;) {
    // Skip lookbehind "(?<=" and "(?<!".
    auto start = pos + 3;
    if (start < pattern.size() && (pattern[start] == '=' || pattern[start] == '!')) {
      pos = start;
      continue;
    }
    auto close = pattern.find('>', start);
    if (close == std::string::npos) break;
    // An escaped "\(" is not a group.
    std::size_t slashes = 0;
    for (auto b = pos; b > 0 && pattern[b - 1] == '\\'; --b) ++slashes;
    if (slashes % 2 == 0) names.push_back(pattern.substr(start, close - start));
    pos = close;
  }
  return names;
}

json captures(const boost::smatch& m, const std::vector<std::string>& names) {
  json out = json::object();
  for (const auto& n : names) {
    if (m[n].matched) out[n] = text::trim(m[n].str());
  }
  return out;
}

json extract_section(std::string_view input, const SectionRule& rule) {
  const std::string wanted = text::to_lower(rule.section);
  auto lines = text::split_lines(input);
  std::vector<std::string> body;
  bool inside = false;
  for (const auto& raw : lines) {
    std::string line = raw;
    for (char& c : line) {
      if (c == '\f') c = ' ';
    }
    if (!inside) {
      std::string trimmed = text::trim(line);
      if (heading_key(trimmed) == wanted) {
        inside = true;
        continue;
      }
      // Inline form: "Abstract: text", "Abstract" plus an em dash, "Abstract. text".
      std::string stripped = strip_numbering(trimmed);
      if (text::starts_with_ci(stripped, rule.section) && stripped.size() > rule.section.size()) {
        std::string rest = stripped.substr(rule.section.size());
        const bool separated = rest.rfind(":", 0) == 0 || rest.rfind(".", 0) == 0 || rest.rfind("\xE2\x80\x94", 0) == 0 ||
                               rest.rfind("-", 0) == 0;
        if (separated) {
          while (!rest.empty() && (rest[0] == ':' || rest[0] == '.' || rest[0] == '-' || rest[0] == ' ')) rest.erase(0, 1);
          if (rest.rfind("\xE2\x80\x94", 0) == 0) rest.erase(0, 3);
          inside = true;
          if (!text::trim(rest).empty()) body.push_back(text::trim(rest));
          continue;
        }
      }
      continue;
    }
    if (looks_like_heading(line)) break;
    body.push_back(text::trim(line));
  }
  // Collapse wrapped lines; keep paragraph breaks.
  std::string out;
  bool pending_break = false;
  for (const auto& l : body) {
    if (l.empty()) {
      pending_break = !out.empty();
      continue;
    }
    if (!out.empty()) out += pending_break ? "\n\n" : " ";
    pending_break = false;
    out += l;
  }
  if (out.empty()) fail(ErrorCode::RuleNoMatch, "no section \"" + rule.section + "\" found");
  return json{{rule.field, out}};
}

json extract_pattern(std::string_view input, const PatternRule& rule) {
  const std::string pattern = translate_pattern(rule.pattern);
  boost::regex re;
  try {
    re.assign(pattern, boost::regex::perl);
  } catch (const boost::regex_error& e) {
    fail(ErrorCode::MalformedConfig, "invalid pattern " + rule.pattern + ": " + e.what());
  }
  const auto names = group_names(pattern);
  if (names.empty()) fail(ErrorCode::MalformedConfig, "pattern has no named groups: " + rule.pattern);
  const std::string subject(input);
  const auto flags = boost::match_default | boost::match_not_dot_newline;
  if (!rule.repeat) {
    boost::smatch m;
    if (!boost::regex_search(subject, m, re, flags)) fail(ErrorCode::RuleNoMatch, "pattern did not match: " + rule.pattern);
    return captures(m, names);
  }
  json all = json::array();
  for (boost::sregex_iterator it(subject.begin(), subject.end(), re, flags), end; it != end; ++it) {
    all.push_back(captures(*it, names));
  }
  if (all.empty()) fail(ErrorCode::RuleNoMatch, "pattern did not match: " + rule.pattern);
  return all;
}

}  // namespace

bool looks_like_heading(std::string_view line) {
  std::string trimmed = text::trim(line);
  if (trimmed.empty() || trimmed.size() > 80) return false;
  if (bare_headings().count(heading_key(trimmed))) return true;
  // Inline forms such as "Keywords: ..." or "Index Terms" followed by a dash.
  for (std::string_view sep : {std::string_view(":"), std::string_view("\xE2\x80\x94")}) {
    auto pos = trimmed.find(sep);
    if (pos != std::string::npos && pos > 0 && bare_headings().count(heading_key(trimmed.substr(0, pos)))) return true;
  }
  static const boost::regex kNumbered(R"(^(?:\d+(?:\.\d+)*\.?|[IVXLC]+\.)\s+[A-Z][^.]*$)");
  if (!boost::regex_match(trimmed, kNumbered)) return false;
  return text::tokenize(trimmed).size() <= 9;
}

json rule_extract(std::string_view input, const RuleSpec& rule) {
  if (const auto* s = std::get_if<SectionRule>(&rule)) return extract_section(input, *s);
  return extract_pattern(input, std::get<PatternRule>(rule));
}

}  // namespace graphy::inspection
