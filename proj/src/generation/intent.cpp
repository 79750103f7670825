#include "graphy/generation/intent.hpp"

#include <algorithm>
#include <set>

#include "graphy/error.hpp"
#include "graphy/text.hpp"

namespace graphy::generation {

using nlohmann::json;

namespace {

std::set<std::string> stems_of(std::string_view s) {
  std::set<std::string> out;
  for (const auto& t : text::tokenize(s)) out.insert(text::stem(t));
  return out;
}

// Every token of `name` appears (stemmed) in the instruction.
bool mentioned(const std::set<std::string>& instruction_stems, std::string_view name) {
  const auto tokens = text::tokenize(name);
  if (tokens.empty()) return false;
  return std::all_of(tokens.begin(), tokens.end(),
                     [&](const std::string& t) { return instruction_stems.count(text::stem(t)) > 0; });
}

ReportKind kind_from_instruction(std::string_view instruction) {
  const auto stems = stems_of(instruction);
  if (stems.count("related") && stems.count("work")) return ReportKind::related_work;
  if (stems.count("survey")) return ReportKind::survey;
  for (const char* w : {"summary", "summarize", "summarise", "overview"}) {
    if (stems.count(text::stem(w))) return ReportKind::summary;
  }
  return ReportKind::related_work;
}

// Schema name matching `proposed`: case-insensitive, or equal stems.
std::optional<std::string> match_name(const std::vector<std::string>& vocabulary, std::string_view proposed) {
  for (const auto& v : vocabulary) {
    if (text::iequals(v, text::trim(proposed))) return v;
  }
  const auto want = text::tokenize(proposed);
  for (const auto& v : vocabulary) {
    const auto have = text::tokenize(v);
    if (have.empty() || have.size() != want.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < have.size(); ++i) same = same && text::stem(have[i]) == text::stem(want[i]);
    if (same) return v;
  }
  return std::nullopt;
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

std::string intent_prompt(std::string_view instruction, const std::vector<std::string>& attributes,
                          const std::vector<std::string>& dimensions) {
  std::string p = "A user wants a report written from a set of selected documents.\n";
  p += "Instruction: " + std::string(instruction) + "\n\n";
  p += "Available attributes: " + text::join(attributes, ", ") + "\n";
  p += "Available dimensions: " + text::join(dimensions, ", ") + "\n\n";
  p += "List the attributes and dimensions needed to write this report. Answer with a JSON array of objects "
       "{\"name\": <attribute or dimension name>, \"kind\": \"attribute\" | \"dimension\"}.";
  return p;
}

}  // namespace

std::string_view to_string(ReportKind kind) noexcept {
  switch (kind) {
    case ReportKind::related_work: return "related-work";
    case ReportKind::survey: return "survey";
    case ReportKind::summary: return "summary";
  }
  return "related-work";
}

std::optional<ReportKind> parse_report_kind(std::string_view name) noexcept {
  if (name == "related-work") return ReportKind::related_work;
  if (name == "survey") return ReportKind::survey;
  if (name == "summary") return ReportKind::summary;
  return std::nullopt;
}

ReportIntent keyword_intent(std::string_view instruction, const graph::GraphSchema& schema,
                            const std::string& fact_label) {
  const auto& fact_schema = schema.at(fact_label);
  const auto stems = stems_of(instruction);
  ReportIntent intent;
  intent.instruction = std::string(instruction);
  intent.fact_label = fact_label;
  intent.report_kind = kind_from_instruction(instruction);
  intent.from_fallback = true;
  for (const char* always : {"title", "abstract"}) {
    if (fact_schema.find(always)) push_unique(intent.required_attributes, always);
  }
  for (const auto& key : fact_schema.keys()) {
    if (mentioned(stems, key)) push_unique(intent.required_attributes, key);
  }
  for (const auto& label : schema.labels(graph::NodeKind::dimension)) {
    if (mentioned(stems, label)) push_unique(intent.required_dimensions, label);
  }
  return intent;
}

ReportIntent interpret_intent(std::string_view instruction, const graph::GraphSchema& schema,
                              const std::string& fact_label, const GenerationModel& model) {
  if (text::trim(instruction).empty()) fail(ErrorCode::InvalidParams, "the report instruction is empty");
  const auto& fact_schema = schema.at(fact_label);
  const auto dimension_labels = schema.labels(graph::NodeKind::dimension);
  if (!model.offline()) {
    try {
      providers::CompletionRequest req;
      req.model_id = model.model_id;
      req.prompt = intent_prompt(instruction, fact_schema.keys(), dimension_labels);
      req.output_schema = inspection::parse_output_schema(
          json{{"array_typed", {{"name", "text"}, {"kind", "text"}}}, {"order", {"name", "kind"}}});
      req.instruction = std::string(instruction);
      req.task = "intent";
      const auto result = model.providers->complete(req);
      ReportIntent intent;
      intent.instruction = std::string(instruction);
      intent.fact_label = fact_label;
      intent.report_kind = kind_from_instruction(instruction);
      for (const auto& item : *result.parsed) {
        const auto name = item.at("name").get<std::string>();
        const auto kind = text::to_lower(item.at("kind").get<std::string>());
        if (kind == "dimension") {
          if (auto m = match_name(dimension_labels, name)) push_unique(intent.required_dimensions, *m);
        } else if (auto m = match_name(fact_schema.keys(), name)) {
          push_unique(intent.required_attributes, *m);
        }
      }
      if (!intent.required_dimensions.empty()) return intent;
    } catch (const Error&) {
      // Provider unavailable or unusable: fall through to the keyword fallback.
    }
  }
  auto intent = keyword_intent(instruction, schema, fact_label);
  if (intent.required_dimensions.empty()) {
    fail(ErrorCode::NoUsableIntent, "the instruction names no known dimension (" + text::join(dimension_labels, ", ") + ")");
  }
  return intent;
}

void validate_intent(const ReportIntent& intent, const graph::GraphSchema& schema) {
  const auto& fact_schema = schema.at(intent.fact_label);
  for (const auto& a : intent.required_attributes) {
    if (!fact_schema.find(a)) fail(ErrorCode::UnknownAttribute, "label " + intent.fact_label + " has no attribute " + a);
  }
  if (intent.required_dimensions.empty()) fail(ErrorCode::NoUsableIntent, "the intent lists no dimension");
  for (const auto& d : intent.required_dimensions) {
    const auto* ls = schema.find(d);
    if (!ls || ls->kind() != graph::NodeKind::dimension) fail(ErrorCode::UnknownLabel, "unknown dimension label " + d);
  }
}

json to_json(const ReportIntent& intent) {
  return json{{"instruction", intent.instruction},
              {"required_attributes", intent.required_attributes},
              {"required_dimensions", intent.required_dimensions},
              {"report_kind", to_string(intent.report_kind)},
              {"fact_label", intent.fact_label},
              {"from_fallback", intent.from_fallback}};
}

ReportIntent intent_from_json(const json& j) {
  try {
    ReportIntent intent;
    intent.instruction = j.at("instruction").get<std::string>();
    intent.required_attributes = j.at("required_attributes").get<std::vector<std::string>>();
    intent.required_dimensions = j.at("required_dimensions").get<std::vector<std::string>>();
    auto kind = parse_report_kind(j.value("report_kind", "related-work"));
    if (!kind) fail(ErrorCode::InvalidParams, "unknown report kind");
    intent.report_kind = *kind;
    intent.fact_label = j.value("fact_label", "Paper");
    intent.from_fallback = j.value("from_fallback", false);
    return intent;
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidParams, std::string("malformed intent: ") + e.what());
  }
}

}  // namespace graphy::generation
