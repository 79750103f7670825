#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphy/generation/payload.hpp"

namespace graphy::generation {

inline constexpr std::size_t kContextBudgetChars = 12000;
inline constexpr const char* kMiscCategory = "Misc";

struct MindMapMember {
  NodeId fact;
  std::vector<NodeId> evidence;  // dimension ids owned by `fact`

  friend bool operator==(const MindMapMember&, const MindMapMember&) = default;
};

struct MindMapCategory {
  std::string name;
  std::string rationale;
  std::vector<MindMapMember> members;

  friend bool operator==(const MindMapCategory&, const MindMapCategory&) = default;
};

struct MindMap {
  std::string root;
  std::vector<MindMapCategory> categories;
  bool partial = false;  // a provider failure sent the remaining facts to Misc
  std::vector<std::string> warnings;

  friend bool operator==(const MindMap&, const MindMap&) = default;
};

/// max(1, budget / average serialized row length).
std::size_t default_batch_size(const PayloadTable& payload, std::size_t budget_chars = kContextBudgetChars);

/// Texts of one row as shown to the model (and used for the batch budget).
std::string describe_row(const PayloadRow& row, const ReportIntent& intent, const graph::GraphSchema& schema);

/// Assigns facts to categories batch by batch. Offline: exact-match grouping
/// on the primary text of the first requested dimension (one membership per
/// distinct text of the fact; facts without it go to Misc). Never drops a
/// fact. Throws InvalidParams (batch_size 0, empty payload).
MindMap build_mindmap(const PayloadTable& payload, const ReportIntent& intent, const graph::GraphSchema& schema,
                      const GenerationModel& model, std::size_t batch_size);

/// Coverage, member containment, evidence locality and unique names.
/// Throws InvalidParams naming the first violation.
void check_mindmap(const MindMap& map, const PayloadTable& payload);

nlohmann::json to_json(const MindMap& map);
MindMap mindmap_from_json(const nlohmann::json& j);  // throws InvalidParams

}  // namespace graphy::generation
