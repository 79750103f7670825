#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphy/graph/property.hpp"
#include "graphy/ingest/chunking.hpp"
#include "graphy/ingest/document.hpp"
#include "graphy/inspection/workflow.hpp"
#include "graphy/providers/embedder.hpp"
#include "graphy/providers/provider.hpp"

namespace graphy::inspection {

struct InspectionServices {
  const providers::ProviderRegistry* providers = nullptr;
  const providers::Embedder* embedder = nullptr;
  ingest::ChunkParams chunking;
  const ingest::PdfTextExtractor* pdf = nullptr;
  std::optional<std::filesystem::path> chunk_cache_dir;
};

enum class NodeState { ok, failed, skipped };
std::string_view to_string(NodeState state) noexcept;

struct NodeStatus {
  NodeState state = NodeState::ok;
  std::string reason;  // "no-match", an error code and message, or the failed ancestor
};

struct InspectionOutput {
  std::string doc_id;
  graph::Properties fact_properties;
  std::map<std::string, std::vector<graph::Properties>> dimensions;  // by subnode name
  std::map<std::string, NodeStatus> status;
  std::vector<std::string> order;  // execution order
  std::map<std::string, std::string> metadata;
  std::string first_line;  // first non-empty line of the extracted text
};

/// Prompt sent to a model subnode: predecessor outputs, the task, numbered
/// excerpts and the JSON Schema the answer must follow.
std::string build_prompt(const InspectNodeSpec& node, const std::vector<std::pair<std::string, nlohmann::json>>& upstream,
                         const std::vector<std::string>& excerpts);

/// Runs every subnode in topological order. A failed subnode marks all of
/// its descendants skipped. Throws DocumentUnreadable when text extraction
/// fails or yields no text.
InspectionOutput run_inspection(const ingest::RawDocument& doc, const WorkflowSpec& spec,
                                const InspectionServices& services);

nlohmann::json to_json(const InspectionOutput& output);

}  // namespace graphy::inspection
