#include "graphy/generation/job.hpp"

#include "graphy/error.hpp"

namespace graphy::generation {

using nlohmann::json;

std::string_view to_string(JobStage stage) noexcept {
  switch (stage) {
    case JobStage::intent_pending: return "intent_pending";
    case JobStage::intent_confirmed: return "intent_confirmed";
    case JobStage::mindmap_pending: return "mindmap_pending";
    case JobStage::mindmap_confirmed: return "mindmap_confirmed";
    case JobStage::draft_ready: return "draft_ready";
  }
  return "intent_pending";
}

std::optional<JobStage> parse_job_stage(std::string_view name) noexcept {
  for (auto s : {JobStage::intent_pending, JobStage::intent_confirmed, JobStage::mindmap_pending,
                 JobStage::mindmap_confirmed, JobStage::draft_ready}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

void GenerationJob::require(bool ok, const std::string& action) const {
  if (!ok) fail(ErrorCode::InvalidState, "cannot " + action + " while the job is " + std::string(to_string(stage_)));
}

void GenerationJob::propose_intent(std::vector<NodeId> selected, ReportIntent intent) {
  if (selected.empty()) fail(ErrorCode::UnknownFact, "a report needs at least one selected fact");
  selected_ = std::move(selected);
  intent_ = std::move(intent);
  mindmap_.reset();
  draft_.reset();
  batch_size_ = 0;
  stage_ = JobStage::intent_pending;
}

void GenerationJob::confirm_intent(const std::optional<ReportIntent>& edited, const graph::GraphSchema& schema) {
  require(intent_ && stage_ == JobStage::intent_pending, "confirm the intent");
  ReportIntent next = edited ? *edited : *intent_;
  if (edited) next.instruction = intent_->instruction;
  validate_intent(next, schema);
  intent_ = std::move(next);
  stage_ = JobStage::intent_confirmed;
}

void GenerationJob::propose_mindmap(MindMap map, std::size_t batch_size) {
  require(stage_ != JobStage::intent_pending, "build a mind map");
  mindmap_ = std::move(map);
  batch_size_ = batch_size;
  draft_.reset();
  stage_ = JobStage::mindmap_pending;
}

void GenerationJob::confirm_mindmap(const std::optional<MindMap>& edited, const PayloadTable& payload) {
  require(mindmap_ && stage_ == JobStage::mindmap_pending, "confirm the mind map");
  MindMap next = edited ? *edited : *mindmap_;
  check_mindmap(next, payload);
  mindmap_ = std::move(next);
  stage_ = JobStage::mindmap_confirmed;
}

void GenerationJob::set_draft(ReportDraft draft) {
  require(stage_ == JobStage::mindmap_confirmed || stage_ == JobStage::draft_ready, "write the draft");
  draft_ = std::move(draft);
  stage_ = JobStage::draft_ready;
}

json GenerationJob::to_json() const {
  json selected = json::array();
  for (const auto& id : selected_) selected.push_back(id.hex());
  return json{{"stage", generation::to_string(stage_)},
              {"selected", selected},
              {"intent", intent_ ? generation::to_json(*intent_) : json(nullptr)},
              {"mindmap", mindmap_ ? generation::to_json(*mindmap_) : json(nullptr)},
              {"draft", draft_ ? generation::to_json(*draft_) : json(nullptr)},
              {"batch_size", batch_size_}};
}

GenerationJob GenerationJob::from_json(const json& j) {
  try {
    GenerationJob job;
    auto stage = parse_job_stage(j.at("stage").get<std::string>());
    if (!stage) fail(ErrorCode::InvalidParams, "unknown job stage");
    job.stage_ = *stage;
    for (const auto& id : j.at("selected")) job.selected_.push_back(NodeId::from_hex(id.get<std::string>()));
    if (!j.at("intent").is_null()) job.intent_ = intent_from_json(j["intent"]);
    if (!j.at("mindmap").is_null()) job.mindmap_ = mindmap_from_json(j["mindmap"]);
    if (!j.at("draft").is_null()) job.draft_ = draft_from_json(j["draft"]);
    job.batch_size_ = j.value("batch_size", std::size_t{0});
    return job;
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidParams, std::string("malformed job: ") + e.what());
  }
}

}  // namespace graphy::generation
