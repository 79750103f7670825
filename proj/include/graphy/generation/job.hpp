#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphy/generation/report.hpp"

namespace graphy::generation {

/// intent_pending -> intent_confirmed -> mindmap_pending -> mindmap_confirmed -> draft_ready.
enum class JobStage { intent_pending, intent_confirmed, mindmap_pending, mindmap_confirmed, draft_ready };

std::string_view to_string(JobStage stage) noexcept;
std::optional<JobStage> parse_job_stage(std::string_view name) noexcept;

/// One report job. Each stage stores its pending object and only an explicit
/// confirmation advances it; re-proposing an earlier stage discards later ones.
/// Out-of-order calls throw InvalidState.
class GenerationJob {
 public:
  GenerationJob() = default;

  JobStage stage() const noexcept { return stage_; }
  const std::vector<NodeId>& selected() const noexcept { return selected_; }
  const std::optional<ReportIntent>& intent() const noexcept { return intent_; }
  const std::optional<MindMap>& mindmap() const noexcept { return mindmap_; }
  const std::optional<ReportDraft>& draft() const noexcept { return draft_; }
  std::size_t batch_size() const noexcept { return batch_size_; }

  /// Starts (or restarts) the job over `selected`. Throws UnknownFact when empty.
  void propose_intent(std::vector<NodeId> selected, ReportIntent intent);
  /// Replaces the pending intent with `edited` when given, validates, advances.
  void confirm_intent(const std::optional<ReportIntent>& edited, const graph::GraphSchema& schema);
  void propose_mindmap(MindMap map, std::size_t batch_size);
  /// Validates `edited` (or the pending map) against `payload` and advances.
  void confirm_mindmap(const std::optional<MindMap>& edited, const PayloadTable& payload);
  void set_draft(ReportDraft draft);

  nlohmann::json to_json() const;
  static GenerationJob from_json(const nlohmann::json& j);  // throws InvalidParams

 private:
  void require(bool ok, const std::string& action) const;

  JobStage stage_ = JobStage::intent_pending;
  std::vector<NodeId> selected_;
  std::optional<ReportIntent> intent_;
  std::optional<MindMap> mindmap_;
  std::optional<ReportDraft> draft_;
  std::size_t batch_size_ = 0;
};

}  // namespace graphy::generation
