#include "graphy/generation/mindmap.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "graphy/error.hpp"
#include "graphy/text.hpp"

namespace graphy::generation {

using nlohmann::json;

namespace {

class Builder {
 public:
  explicit Builder(std::string root) { map_.root = std::move(root); }

  void add(const std::string& name, const std::string& rationale, const NodeId& fact, const std::vector<NodeId>& evidence) {
    auto& cat = category(name, rationale);
    for (auto& m : cat.members) {
      if (m.fact == fact) {
        for (const auto& e : evidence) {
          if (std::find(m.evidence.begin(), m.evidence.end(), e) == m.evidence.end()) m.evidence.push_back(e);
        }
        return;
      }
    }
    cat.members.push_back(MindMapMember{fact, evidence});
  }

  void misc(const NodeId& fact, const std::string& rationale) { misc_.push_back({fact, rationale}); }

  MindMap finish() {
    for (const auto& [fact, rationale] : misc_) add(kMiscCategory, rationale, fact, {});
    // Misc goes last.
    std::stable_partition(map_.categories.begin(), map_.categories.end(),
                          [](const MindMapCategory& c) { return c.name != kMiscCategory; });
    return std::move(map_);
  }

  const MindMap& current() const { return map_; }
  MindMap& current() { return map_; }

 private:
  MindMapCategory& category(const std::string& name, const std::string& rationale) {
    const auto key = text::to_lower(text::trim(name));
    for (auto& c : map_.categories) {
      if (text::to_lower(text::trim(c.name)) == key) return c;
    }
    map_.categories.push_back(MindMapCategory{text::trim(name), rationale, {}});
    return map_.categories.back();
  }

  MindMap map_;
  std::vector<std::pair<NodeId, std::string>> misc_;
};

std::vector<NodeId> requested_evidence(const PayloadRow& row, const ReportIntent& intent) {
  std::vector<NodeId> out;
  for (const auto& d : intent.required_dimensions) {
    auto it = row.dimensions.find(d);
    if (it == row.dimensions.end()) continue;
    for (const auto& item : it->second) out.push_back(item.id);
  }
  return out;
}

void offline_batch(Builder& b, const std::vector<const PayloadRow*>& batch, const ReportIntent& intent,
                   const graph::GraphSchema& schema) {
  const std::string& label = intent.required_dimensions.front();
  for (const auto* row : batch) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<NodeId>> evidence;
    auto it = row->dimensions.find(label);
    if (it != row->dimensions.end()) {
      for (const auto& item : it->second) {
        const auto t = text::trim(primary_text(schema, label, item));
        if (t.empty()) continue;
        if (!evidence.count(t)) order.push_back(t);
        evidence[t].push_back(item.id);
      }
    }
    if (order.empty()) {
      b.misc(row->fact, "Papers without a " + label);
      continue;
    }
    for (const auto& t : order) b.add(t, label + " shared by its members", row->fact, evidence[t]);
  }
}

std::string batch_prompt(const MindMap& current, const std::vector<const PayloadRow*>& batch, const ReportIntent& intent,
                         const graph::GraphSchema& schema) {
  std::string p = "Organize papers into a mind map for this request: " + intent.instruction + "\n";
  p += "Group them by: " + text::join(intent.required_dimensions, ", ") + "\n\n";
  if (current.categories.empty()) {
    p += "There are no categories yet.\n";
  } else {
    p += "Existing categories (reuse a name when a paper fits):\n";
    for (const auto& c : current.categories) p += "- " + c.name + ": " + c.rationale + "\n";
  }
  p += "\nPapers:\n";
  for (const auto* row : batch) p += describe_row(*row, intent, schema);
  p += "\nAssign every paper to one or more categories. Answer with a JSON array of objects "
       "{\"fact\": <paper id>, \"category\": <name>, \"rationale\": <why this category>, "
       "\"evidence\": <comma-separated dimension ids supporting it>}.";
  return p;
}

std::vector<NodeId> parse_evidence(const std::string& s, const std::vector<NodeId>& allowed) {
  std::vector<NodeId> out;
  std::string token;
  auto flush = [&] {
    if (NodeId::is_valid_hex(token)) {
      auto id = NodeId::from_hex(token);
      if (std::find(allowed.begin(), allowed.end(), id) != allowed.end() &&
          std::find(out.begin(), out.end(), id) == out.end()) {
        out.push_back(id);
      }
    }
    token.clear();
  };
  for (char c : s) {
    if (std::isxdigit(static_cast<unsigned char>(c))) {
      token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

void model_batch(Builder& b, const std::vector<const PayloadRow*>& batch, const ReportIntent& intent,
                 const graph::GraphSchema& schema, const GenerationModel& model) {
  providers::CompletionRequest req;
  req.model_id = model.model_id;
  req.prompt = batch_prompt(b.current(), batch, intent, schema);
  req.output_schema = inspection::parse_output_schema(
      json{{"array_typed", {{"fact", "text"}, {"category", "text"}, {"rationale", "text"}, {"evidence", "text"}}},
           {"required", {"fact", "category"}},
           {"order", {"fact", "category", "rationale", "evidence"}}});
  req.instruction = intent.instruction;
  req.task = "mindmap";
  providers::CompletionResult result;
  try {
    result = model.providers->complete(req);
  } catch (const Error&) {
    req.attempt = 1;
    result = model.providers->complete(req);
  }
  std::set<NodeId> placed;
  for (const auto& item : *result.parsed) {
    const auto fact_text = text::to_lower(text::trim(item.at("fact").get<std::string>()));
    const auto category = text::trim(item.at("category").get<std::string>());
    if (category.empty()) continue;
    const PayloadRow* row = nullptr;
    for (const auto* r : batch) {
      if (r->fact.hex() == fact_text || (fact_text.size() >= 8 && r->fact.hex().rfind(fact_text, 0) == 0)) row = r;
    }
    if (!row) continue;
    const auto allowed = requested_evidence(*row, intent);
    auto evidence = parse_evidence(item.value("evidence", ""), allowed);
    if (evidence.empty()) evidence = allowed;
    b.add(category, item.value("rationale", ""), row->fact, evidence);
    placed.insert(row->fact);
  }
  for (const auto* row : batch) {
    if (!placed.count(row->fact)) b.misc(row->fact, "Papers the model did not place");
  }
}

}  // namespace

std::string describe_row(const PayloadRow& row, const ReportIntent& intent, const graph::GraphSchema& schema) {
  std::string s = "[" + row.fact.hex() + "] " + row.text("title") + "\n";
  for (const auto& a : intent.required_attributes) {
    if (a == "title") continue;
    const auto v = row.text(a);
    if (!v.empty()) s += "  " + a + ": " + v + "\n";
  }
  for (const auto& d : intent.required_dimensions) {
    auto it = row.dimensions.find(d);
    if (it == row.dimensions.end()) continue;
    for (const auto& item : it->second) s += "  " + d + " (" + item.id.hex() + "): " + primary_text(schema, d, item) + "\n";
  }
  return s;
}

std::size_t default_batch_size(const PayloadTable& payload, std::size_t budget_chars) {
  if (payload.rows.empty()) return 1;
  std::size_t total = 0;
  for (const auto& row : payload.rows) {
    PayloadTable one{{row}};
    total += to_json(one)["rows"][0].dump().size();
  }
  const std::size_t avg = std::max<std::size_t>(1, total / payload.rows.size());
  return std::max<std::size_t>(1, budget_chars / avg);
}

MindMap build_mindmap(const PayloadTable& payload, const ReportIntent& intent, const graph::GraphSchema& schema,
                      const GenerationModel& model, std::size_t batch_size) {
  if (batch_size == 0) fail(ErrorCode::InvalidParams, "batch_size must be at least 1");
  if (payload.rows.empty()) fail(ErrorCode::InvalidParams, "the payload has no rows");
  if (intent.required_dimensions.empty()) fail(ErrorCode::NoUsableIntent, "the intent lists no dimension");
  Builder b(intent.instruction);
  bool failed = false;
  for (std::size_t start = 0; start < payload.rows.size(); start += batch_size) {
    std::vector<const PayloadRow*> batch;
    for (std::size_t i = start; i < std::min(payload.rows.size(), start + batch_size); ++i) batch.push_back(&payload.rows[i]);
    if (failed) {
      for (const auto* row : batch) b.misc(row->fact, "Papers left unplaced after a model failure");
      continue;
    }
    if (model.offline()) {
      offline_batch(b, batch, intent, schema);
      continue;
    }
    try {
      model_batch(b, batch, intent, schema, model);
    } catch (const Error& e) {
      failed = true;
      b.current().partial = true;
      b.current().warnings.push_back(std::string("mind map batch failed: ") + e.what());
      for (const auto* row : batch) b.misc(row->fact, "Papers left unplaced after a model failure");
    }
  }
  return b.finish();
}

void check_mindmap(const MindMap& map, const PayloadTable& payload) {
  if (map.categories.empty()) fail(ErrorCode::InvalidParams, "the mind map has no categories");
  std::set<std::string> names;
  std::set<NodeId> covered;
  for (const auto& c : map.categories) {
    const auto key = text::to_lower(text::trim(c.name));
    if (key.empty()) fail(ErrorCode::InvalidParams, "a category has an empty name");
    if (!names.insert(key).second) fail(ErrorCode::InvalidParams, "duplicate category " + c.name);
    if (c.members.empty()) fail(ErrorCode::InvalidParams, "category " + c.name + " has no members");
    for (const auto& m : c.members) {
      const auto* row = payload.find(m.fact);
      if (!row) fail(ErrorCode::InvalidParams, "category " + c.name + " lists a fact outside the selection: " + m.fact.hex());
      for (const auto& e : m.evidence) {
        bool owned = false;
        for (const auto& [label, items] : row->dimensions) {
          for (const auto& item : items) owned = owned || item.id == e;
        }
        if (!owned) fail(ErrorCode::InvalidParams, "evidence " + e.hex() + " does not belong to " + m.fact.hex());
      }
      covered.insert(m.fact);
    }
  }
  for (const auto& row : payload.rows) {
    if (!covered.count(row.fact)) fail(ErrorCode::InvalidParams, "fact " + row.fact.hex() + " is in no category");
  }
}

json to_json(const MindMap& map) {
  json categories = json::array();
  for (const auto& c : map.categories) {
    json members = json::array();
    for (const auto& m : c.members) {
      json evidence = json::array();
      for (const auto& e : m.evidence) evidence.push_back(e.hex());
      members.push_back(json{{"fact", m.fact.hex()}, {"evidence", evidence}});
    }
    categories.push_back(json{{"name", c.name}, {"rationale", c.rationale}, {"members", members}});
  }
  return json{{"root", map.root}, {"categories", categories}, {"partial", map.partial}, {"warnings", map.warnings}};
}

MindMap mindmap_from_json(const json& j) {
  try {
    MindMap map;
    map.root = j.value("root", "");
    for (const auto& c : j.at("categories")) {
      MindMapCategory cat{c.at("name").get<std::string>(), c.value("rationale", ""), {}};
      for (const auto& m : c.at("members")) {
        MindMapMember member{NodeId::from_hex(m.at("fact").get<std::string>()), {}};
        if (m.contains("evidence")) {
          for (const auto& e : m["evidence"]) member.evidence.push_back(NodeId::from_hex(e.get<std::string>()));
        }
        cat.members.push_back(std::move(member));
      }
      map.categories.push_back(std::move(cat));
    }
    map.partial = j.value("partial", false);
    if (j.contains("warnings")) map.warnings = j["warnings"].get<std::vector<std::string>>();
    return map;
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidParams, std::string("malformed mind map: ") + e.what());
  }
}

}  // namespace graphy::generation
