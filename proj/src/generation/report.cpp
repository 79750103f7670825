#include "graphy/generation/report.hpp"

#include <algorithm>
#include <set>

#include "graphy/error.hpp"
#include "graphy/text.hpp"

namespace graphy::generation {

using nlohmann::json;

namespace {

std::string kind_title(ReportKind kind) {
  switch (kind) {
    case ReportKind::related_work: return "Related Work";
    case ReportKind::survey: return "Survey";
    case ReportKind::summary: return "Summary";
  }
  return "Report";
}

std::string kind_phrase(ReportKind kind) {
  switch (kind) {
    case ReportKind::related_work: return "related work section";
    case ReportKind::survey: return "survey";
    case ReportKind::summary: return "summary";
  }
  return "report";
}

std::string one_line(std::string_view s) {
  std::string out;
  for (char c : s) out += (c == '\n' || c == '\r') ? ' ' : c;
  return text::trim(out);
}

std::string plural(std::size_t n, const char* word) { return std::to_string(n) + " " + word + (n == 1 ? "" : "s"); }

std::string evidence_text(const PayloadRow& row, const MindMapMember& m, const graph::GraphSchema& schema) {
  std::vector<std::string> texts;
  for (const auto& e : m.evidence) {
    for (const auto& [label, items] : row.dimensions) {
      for (const auto& item : items) {
        if (item.id != e) continue;
        auto t = one_line(primary_text(schema, label, item));
        if (!t.empty() && std::find(texts.begin(), texts.end(), t) == texts.end()) texts.push_back(t);
      }
    }
  }
  return text::join(texts, "; ");
}

void cite_all(Section& s) {
  for (const auto& p : s.paragraphs) {
    for (const auto& seg : p.segments) {
      for (const auto& c : seg.cites) {
        if (std::find(s.cited.begin(), s.cited.end(), c) == s.cited.end()) s.cited.push_back(c);
      }
    }
  }
}

Section offline_category(const MindMapCategory& c, const PayloadTable& payload, const graph::GraphSchema& schema) {
  Section s{one_line(c.name), {}, {}};
  Paragraph list;
  list.segments.push_back(Segment{"Works addressing " + one_line(c.name) + ": ", {}});
  for (std::size_t i = 0; i < c.members.size(); ++i) {
    const auto* row = payload.find(c.members[i].fact);
    list.segments.push_back(Segment{one_line(row->text("title")), {row->fact}});
    list.segments.push_back(Segment{i + 1 == c.members.size() ? "." : "; ", {}});
  }
  s.paragraphs.push_back(std::move(list));
  for (const auto& m : c.members) {
    const auto* row = payload.find(m.fact);
    const auto ev = evidence_text(*row, m, schema);
    if (ev.empty()) continue;
    s.paragraphs.push_back(Paragraph{{Segment{one_line(row->text("title")) + ": " + ev + ".", {m.fact}}}});
  }
  return s;
}

std::string model_paragraph(const GenerationModel& model, const std::string& prompt, const ReportIntent& intent,
                            const std::string& task) {
  providers::CompletionRequest req;
  req.model_id = model.model_id;
  req.prompt = prompt;
  req.output_schema = inspection::parse_output_schema(json{{"single_typed", {{"paragraph", "text"}}}});
  req.instruction = intent.instruction;
  req.task = task;
  auto result = model.providers->complete(req);
  auto p = text::trim(result.parsed->at("paragraph").get<std::string>());
  if (p.empty()) fail(ErrorCode::ProviderFailure, "the model returned an empty paragraph for " + task);
  return p;
}

std::string members_block(const MindMapCategory& c, const PayloadTable& payload, const ReportIntent& intent,
                          const graph::GraphSchema& schema) {
  std::string s;
  for (const auto& m : c.members) {
    const auto* row = payload.find(m.fact);
    s += describe_row(*row, intent, schema);
    const auto ev = evidence_text(*row, m, schema);
    if (!ev.empty()) s += "  evidence: " + ev + "\n";
  }
  return s;
}

std::vector<NodeId> ids_from(const json& j) {
  std::vector<NodeId> out;
  for (const auto& v : j) out.push_back(NodeId::from_hex(v.get<std::string>()));
  return out;
}

json ids_json(const std::vector<NodeId>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(id.hex());
  return out;
}

std::string markdown_cites(const std::vector<NodeId>& cites) {
  std::vector<std::string> keys;
  for (const auto& c : cites) keys.push_back("@" + cite_key(c));
  return "[" + text::join(keys, "; ") + "]";
}

std::string latex_cites(const std::vector<NodeId>& cites) {
  std::vector<std::string> keys;
  for (const auto& c : cites) keys.push_back(cite_key(c));
  return "\\cite{" + text::join(keys, ",") + "}";
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept {
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  if (name == "latex" || name == "tex") return ReportFormat::latex;
  return std::nullopt;
}

std::string cite_key(const NodeId& fact) { return fact.hex(); }

ReportDraft write_report(const MindMap& map, const ReportIntent& intent, const PayloadTable& payload,
                         const graph::GraphSchema& schema, const GenerationModel& model) {
  check_mindmap(map, payload);
  ReportDraft draft;
  draft.title = kind_title(intent.report_kind) + ": " + text::join(intent.required_dimensions, " and ");
  std::vector<std::string> names;
  for (const auto& c : map.categories) names.push_back(one_line(c.name));
  const std::string dims = text::join(intent.required_dimensions, " and ");

  Section intro{"Introduction", {}, {}};
  Section conclusion{"Conclusion", {}, {}};
  std::vector<Section> body;
  if (model.offline()) {
    intro.paragraphs.push_back(Paragraph{{Segment{"This " + kind_phrase(intent.report_kind) + " reviews " +
                                                      plural(payload.rows.size(), "paper") + ", organized by " + dims +
                                                      " into " + plural(map.categories.size(), "group") + ": " +
                                                      text::join(names, "; ") + ".",
                                                  {}}}});
    for (const auto& c : map.categories) body.push_back(offline_category(c, payload, schema));
    std::vector<std::string> counts;
    for (const auto& c : map.categories) counts.push_back(one_line(c.name) + " (" + plural(c.members.size(), "paper") + ")");
    conclusion.paragraphs.push_back(
        Paragraph{{Segment{"Across the selected papers, the groups are " + text::join(counts, "; ") + ".", {}}}});
  } else {
    const std::string request = "Request: " + intent.instruction + "\n";
    intro.paragraphs.push_back(Paragraph{{Segment{
        model_paragraph(model,
                        request + "Write the introduction of the " + kind_phrase(intent.report_kind) + ". It covers " +
                            plural(payload.rows.size(), "paper") + " grouped by " + dims + " into: " +
                            text::join(names, "; ") + ".\nAnswer with JSON {\"paragraph\": <text>}.",
                        intent, "report-introduction"),
        {}}}});
    for (const auto& c : map.categories) {
      Section s{one_line(c.name), {}, {}};
      std::vector<NodeId> members;
      for (const auto& m : c.members) members.push_back(m.fact);
      const auto paragraph = model_paragraph(
          model,
          request + "Write one paragraph about the group \"" + c.name + "\" (" + c.rationale + ") using only these papers:\n" +
              members_block(c, payload, intent, schema) + "Answer with JSON {\"paragraph\": <text>}.",
          intent, "report-section");
      s.paragraphs.push_back(Paragraph{{Segment{paragraph, members}}});
      body.push_back(std::move(s));
    }
    conclusion.paragraphs.push_back(Paragraph{{Segment{
        model_paragraph(model,
                        request + "Write a short conclusion for a " + kind_phrase(intent.report_kind) +
                            " whose groups are: " + text::join(names, "; ") + ".\nAnswer with JSON {\"paragraph\": <text>}.",
                        intent, "report-conclusion"),
        {}}}});
  }
  draft.sections.push_back(std::move(intro));
  for (auto& s : body) draft.sections.push_back(std::move(s));
  draft.sections.push_back(std::move(conclusion));

  std::vector<NodeId> order;
  for (auto& s : draft.sections) {
    cite_all(s);
    for (const auto& c : s.cited) {
      if (std::find(order.begin(), order.end(), c) == order.end()) order.push_back(c);
    }
  }
  for (const auto& id : order) {
    const auto* row = payload.find(id);
    std::string entry = one_line(row->text("title"));
    const auto year = row->text("year");
    if (!year.empty()) entry += " (" + year + ")";
    draft.bibliography.push_back(BibEntry{id, entry + "."});
  }
  return draft;
}

std::string latex_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\textbackslash{}"; break;
      case '&': case '%': case '$': case '#': case '_': case '{': case '}':
        out += '\\';
        out += c;
        break;
      case '~': out += "\\textasciitilde{}"; break;
      case '^': out += "\\textasciicircum{}"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_markdown(const ReportDraft& draft) {
  std::string out = "# " + one_line(draft.title) + "\n";
  for (const auto& s : draft.sections) {
    out += "\n## " + one_line(s.heading) + "\n";
    for (const auto& p : s.paragraphs) {
      out += "\n";
      for (const auto& seg : p.segments) {
        out += seg.text;
        if (!seg.cites.empty()) out += (seg.text.empty() ? "" : " ") + markdown_cites(seg.cites);
      }
      out += "\n";
    }
  }
  if (!draft.bibliography.empty()) {
    out += "\n---\n\n**References**\n\n";
    for (const auto& b : draft.bibliography) out += "- @" + cite_key(b.fact) + ": " + b.text + "\n";
  }
  return out;
}

std::string render_latex(const ReportDraft& draft) {
  std::string out =
      "\\documentclass{article}\n"
      "\\usepackage[utf8]{inputenc}\n"
      "\\usepackage[T1]{fontenc}\n"
      "\\title{" + latex_escape(one_line(draft.title)) + "}\n"
      "\\date{}\n"
      "\\begin{document}\n"
      "\\maketitle\n";
  for (const auto& s : draft.sections) {
    out += "\n\\section{" + latex_escape(one_line(s.heading)) + "}\n";
    for (const auto& p : s.paragraphs) {
      out += "\n";
      for (const auto& seg : p.segments) {
        out += latex_escape(seg.text);
        if (!seg.cites.empty()) out += (seg.text.empty() ? "" : "~") + latex_cites(seg.cites);
      }
      out += "\n";
    }
  }
  if (!draft.bibliography.empty()) {
    out += "\n\\begin{thebibliography}{" + std::to_string(draft.bibliography.size()) + "}\n";
    for (const auto& b : draft.bibliography) out += "\\bibitem{" + cite_key(b.fact) + "} " + latex_escape(b.text) + "\n";
    out += "\\end{thebibliography}\n";
  }
  out += "\n\\end{document}\n";
  return out;
}

std::string render_report(const ReportDraft& draft, ReportFormat format) {
  return format == ReportFormat::markdown ? render_markdown(draft) : render_latex(draft);
}

std::string render_report(const ReportDraft& draft, std::string_view format) {
  auto f = parse_report_format(format);
  if (!f) fail(ErrorCode::UnsupportedFormat, "unsupported report format " + std::string(format) + " (markdown or latex)");
  return render_report(draft, *f);
}

json to_json(const ReportDraft& draft) {
  json sections = json::array();
  for (const auto& s : draft.sections) {
    json paragraphs = json::array();
    for (const auto& p : s.paragraphs) {
      json segments = json::array();
      for (const auto& seg : p.segments) segments.push_back(json{{"text", seg.text}, {"cites", ids_json(seg.cites)}});
      paragraphs.push_back(json{{"segments", segments}});
    }
    sections.push_back(json{{"heading", s.heading}, {"paragraphs", paragraphs}, {"cited", ids_json(s.cited)}});
  }
  json bibliography = json::array();
  for (const auto& b : draft.bibliography) {
    bibliography.push_back(json{{"fact", b.fact.hex()}, {"key", cite_key(b.fact)}, {"text", b.text}});
  }
  return json{{"title", draft.title}, {"sections", sections}, {"bibliography", bibliography}};
}

ReportDraft draft_from_json(const json& j) {
  try {
    ReportDraft d;
    d.title = j.at("title").get<std::string>();
    for (const auto& s : j.at("sections")) {
      Section section{s.at("heading").get<std::string>(), {}, ids_from(s.at("cited"))};
      for (const auto& p : s.at("paragraphs")) {
        Paragraph para;
        for (const auto& seg : p.at("segments")) {
          para.segments.push_back(Segment{seg.at("text").get<std::string>(), ids_from(seg.at("cites"))});
        }
        section.paragraphs.push_back(std::move(para));
      }
      d.sections.push_back(std::move(section));
    }
    for (const auto& b : j.at("bibliography")) {
      d.bibliography.push_back(BibEntry{NodeId::from_hex(b.at("fact").get<std::string>()), b.at("text").get<std::string>()});
    }
    return d;
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidParams, std::string("malformed draft: ") + e.what());
  }
}

}  // namespace graphy::generation
