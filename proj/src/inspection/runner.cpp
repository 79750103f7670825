#include "graphy/inspection/runner.hpp"

#include <memory>
#include <set>

#include "graphy/error.hpp"
#include "graphy/ingest/chunk_index.hpp"
#include "graphy/inspection/rule_extract.hpp"
#include "graphy/text.hpp"

namespace graphy::inspection {

using nlohmann::json;

std::string_view to_string(NodeState state) noexcept {
  switch (state) {
    case NodeState::ok: return "ok";
    case NodeState::failed: return "failed";
    case NodeState::skipped: return "skipped";
  }
  return "ok";
}

std::string build_prompt(const InspectNodeSpec& node, const std::vector<std::pair<std::string, json>>& upstream,
                         const std::vector<std::string>& excerpts) {
  const auto& model = std::get<ModelSpec>(node.extractor);
  std::string prompt;
  for (const auto& [name, value] : upstream) {
    prompt += "Output of " + name + ":\n" + value.dump() + "\n\n";
  }
  prompt += "Task: " + model.query + "\n\n";
  prompt += "Excerpts:\n";
  for (std::size_t i = 0; i < excerpts.size(); ++i) {
    prompt += "[" + std::to_string(i + 1) + "] " + excerpts[i] + "\n";
  }
  prompt += "\nAnswer with JSON only, matching this JSON Schema:\n" + describe(node.output_schema).dump();
  return prompt;
}

namespace {

std::string failure_reason(const Error& e) {
  if (e.code() == ErrorCode::RuleNoMatch) return "no-match";
  return std::string(graphy::to_string(e.code())) + ": " + e.what();
}

}  // namespace

InspectionOutput run_inspection(const ingest::RawDocument& doc, const WorkflowSpec& spec,
                                const InspectionServices& services) {
  InspectionOutput out;
  out.doc_id = doc.doc_id;
  ingest::ExtractedText extracted;
  try {
    extracted = ingest::extract_text(doc, services.pdf);
  } catch (const Error& e) {
    fail(ErrorCode::DocumentUnreadable, doc.doc_id + ": " + std::string(graphy::to_string(e.code())) + ": " + e.what());
  }
  if (text::trim(extracted.text).empty()) fail(ErrorCode::DocumentUnreadable, doc.doc_id + ": no extractable text");
  out.metadata = extracted.metadata;
  for (const auto& line : text::split_lines(extracted.text)) {
    std::string t = text::trim(line);
    if (!t.empty()) {
      out.first_line = t;
      break;
    }
  }

  std::unique_ptr<ingest::ChunkIndex> index;
  auto chunk_index = [&]() -> const ingest::ChunkIndex& {
    if (!index) {
      if (!services.embedder) fail(ErrorCode::EmbedderFailure, "no embedder configured");
      auto chunks = ingest::chunk_text(extracted.text, services.chunking, doc.doc_id);
      index = std::make_unique<ingest::ChunkIndex>(
          services.chunk_cache_dir ? ingest::ChunkIndex::build_cached(chunks, *services.embedder, *services.chunk_cache_dir)
                                   : ingest::ChunkIndex::build(chunks, *services.embedder));
    }
    return *index;
  };

  std::map<std::string, json> outputs;
  out.order = topological_order(spec);
  for (const auto& name : out.order) {
    const InspectNodeSpec& node = *spec.find(name);
    const auto preds = spec.predecessors(name);
    std::string blocked;
    for (const auto& p : preds) {
      if (out.status.at(p).state != NodeState::ok) {
        blocked = p;
        break;
      }
    }
    if (!blocked.empty()) {
      out.status[name] = NodeStatus{NodeState::skipped, "upstream " + blocked + " did not succeed"};
      continue;
    }
    try {
      json value;
      if (node.is_rule()) {
        value = validate_output(rule_extract(extracted.text, std::get<RuleSpec>(node.extractor)), node.output_schema);
      } else {
        if (!services.providers) fail(ErrorCode::NoProvider, "no provider registry configured");
        const auto& model = std::get<ModelSpec>(node.extractor);
        std::vector<std::string> excerpts;
        for (const auto& c : chunk_index().retrieve(model.query, node.retrieval_k, *services.embedder)) {
          excerpts.push_back(c.text);
        }
        std::vector<std::pair<std::string, json>> upstream;
        for (const auto& p : preds) upstream.emplace_back(p, outputs.at(p));
        providers::CompletionRequest request;
        request.model_id = model.model_id;
        request.prompt = build_prompt(node, upstream, excerpts);
        request.context_chunks = excerpts;
        request.output_schema = node.output_schema;
        request.instruction = model.query;
        request.doc_id = doc.doc_id;
        request.task = node.name;
        auto result = services.providers->complete(request);
        value = *result.parsed;
      }
      outputs[name] = value;
      if (node.output_schema.kind == OutputKind::single_typed && !node.as_node) {
        for (auto& [k, v] : to_properties(value, node.output_schema)) out.fact_properties[k] = std::move(v);
      } else {
        auto& items = out.dimensions[name];
        if (value.is_array()) {
          for (const auto& item : value) items.push_back(to_properties(item, node.output_schema));
        } else {
          items.push_back(to_properties(value, node.output_schema));
        }
      }
      out.status[name] = NodeStatus{NodeState::ok, ""};
    } catch (const Error& e) {
      out.status[name] = NodeStatus{NodeState::failed, failure_reason(e)};
    } catch (const std::exception& e) {
      out.status[name] = NodeStatus{NodeState::failed, std::string("internal: ") + e.what()};
    }
  }
  return out;
}

json to_json(const InspectionOutput& output) {
  json dims = json::object();
  for (const auto& [name, items] : output.dimensions) {
    json list = json::array();
    for (const auto& item : items) list.push_back(graph::to_json(item));
    dims[name] = list;
  }
  json status = json::object();
  for (const auto& [name, s] : output.status) {
    status[name] = {{"state", std::string(to_string(s.state))}, {"reason", s.reason}};
  }
  return {{"doc_id", output.doc_id},
          {"fact_properties", graph::to_json(output.fact_properties)},
          {"dimensions", dims},
          {"status", status},
          {"order", output.order}};
}

}  // namespace graphy::inspection
