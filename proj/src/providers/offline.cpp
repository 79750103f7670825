#include "graphy/providers/offline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "graphy/error.hpp"
#include "graphy/text.hpp"

namespace graphy::providers {

using nlohmann::json;

ScriptedProvider::ScriptedProvider(const json& fixtures) {
  if (!fixtures.is_object() || !fixtures.contains("scripts") || !fixtures["scripts"].is_array()) {
    fail(ErrorCode::ConfigError, "scripted fixtures need a \"scripts\" array");
  }
  for (const auto& s : fixtures["scripts"]) {
    if (!s.is_object() || !s.contains("task") || !s["task"].is_string()) {
      fail(ErrorCode::ConfigError, "each script needs a task");
    }
    Script script;
    auto text_of = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (s.contains("response")) script.response = text_of(s["response"]);
    if (s.contains("repair_response")) script.repair_response = text_of(s["repair_response"]);
    script.fail = s.value("fail", false);
    if (!script.fail && script.response.empty()) fail(ErrorCode::ConfigError, "script without a response");
    add(s.value("doc_id", "*"), s["task"].get<std::string>(), std::move(script));
  }
}

ScriptedProvider ScriptedProvider::from_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::ConfigError, "cannot read scripted fixtures " + file.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::ConfigError, "scripted fixtures are not valid JSON: " + file.string());
  return ScriptedProvider(j);
}

void ScriptedProvider::add(std::string doc_id, std::string task, Script script) {
  scripts_[{std::move(doc_id), std::move(task)}] = std::move(script);
}

CompletionResult ScriptedProvider::complete(const CompletionRequest& request) const {
  auto it = scripts_.find({request.doc_id, request.task});
  if (it == scripts_.end()) it = scripts_.find({"*", request.task});
  if (it == scripts_.end()) {
    fail(ErrorCode::ProviderFailure, "no script for (" + request.doc_id + ", " + request.task + ")");
  }
  const Script& s = it->second;
  if (s.fail) fail(ErrorCode::ProviderFailure, "scripted failure for (" + request.doc_id + ", " + request.task + ")");
  CompletionResult out;
  out.provider_id = id();
  out.raw_text = request.attempt > 0 && s.repair_response ? *s.repair_response : s.response;
  return out;
}

std::vector<std::string> ExtractiveProvider::select_sentences(const std::string& query,
                                                              const std::vector<std::string>& context) {
  const auto q = text::content_stems(query);
  const std::set<std::string> qset(q.begin(), q.end());
  struct Scored {
    std::size_t score;
    std::size_t position;
    std::string sentence;
  };
  std::vector<Scored> scored;
  std::set<std::string> seen;
  std::size_t position = 0;
  for (const auto& chunk : context) {
    for (auto& sentence : text::split_sentences(chunk)) {
      std::string s = text::trim(sentence);
      if (s.empty() || !seen.insert(s).second) continue;
      std::size_t score = 0;
      for (const auto& stem : text::content_stems(s)) score += qset.count(stem);
      if (score > 0) scored.push_back({score, position, std::move(s)});
      ++position;
    }
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.position < b.position;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < kMaxItems; ++i) out.push_back(std::move(scored[i].sentence));
  return out;
}

CompletionResult ExtractiveProvider::complete(const CompletionRequest& request) const {
  const std::string& query = request.instruction.empty() ? request.prompt : request.instruction;
  auto sentences = select_sentences(query, request.context_chunks);
  CompletionResult out;
  out.provider_id = id();
  if (!request.output_schema) {
    out.raw_text = sentences.empty() ? std::string("(no matching sentences)") : text::join(sentences, "\n");
    return out;
  }
  const auto& schema = *request.output_schema;
  const std::string field = schema.primary_text_field();
  if (schema.kind == inspection::OutputKind::array_typed) {
    json items = json::array();
    if (!field.empty()) {
      for (const auto& s : sentences) items.push_back({{field, s}});
    }
    out.raw_text = items.dump();
  } else {
    json object = json::object();
    if (!field.empty() && !sentences.empty()) object[field] = text::join(sentences, " ");
    out.raw_text = object.dump();
  }
  return out;
}

}  // namespace graphy::providers
