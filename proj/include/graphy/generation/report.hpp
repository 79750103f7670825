#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "graphy/generation/mindmap.hpp"

namespace graphy::generation {

/// A run of prose followed by citations of `cites` (rendered after the text).
struct Segment {
  std::string text;
  std::vector<NodeId> cites;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Paragraph {
  std::vector<Segment> segments;

  friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

struct Section {
  std::string heading;
  std::vector<Paragraph> paragraphs;
  std::vector<NodeId> cited;  // first-citation order

  friend bool operator==(const Section&, const Section&) = default;
};

struct BibEntry {
  NodeId fact;
  std::string text;  // "Title (Year)."

  friend bool operator==(const BibEntry&, const BibEntry&) = default;
};

struct ReportDraft {
  std::string title;
  std::vector<Section> sections;
  std::vector<BibEntry> bibliography;  // first-citation order

  friend bool operator==(const ReportDraft&, const ReportDraft&) = default;
};

enum class ReportFormat { markdown, latex };

std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept;

/// Introduction, one section per category in order, Conclusion. Every member
/// is cited in its category's section. Throws InvalidParams (empty or
/// inconsistent mind map), ProviderFailure.
ReportDraft write_report(const MindMap& map, const ReportIntent& intent, const PayloadTable& payload,
                         const graph::GraphSchema& schema, const GenerationModel& model);

/// Citation key of a fact (its id).
std::string cite_key(const NodeId& fact);

std::string render_markdown(const ReportDraft& draft);
std::string render_latex(const ReportDraft& draft);
std::string render_report(const ReportDraft& draft, ReportFormat format);
std::string render_report(const ReportDraft& draft, std::string_view format);  // throws UnsupportedFormat

std::string latex_escape(std::string_view text);

nlohmann::json to_json(const ReportDraft& draft);
ReportDraft draft_from_json(const nlohmann::json& j);  // throws InvalidParams

}  // namespace graphy::generation
