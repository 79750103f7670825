#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "graphy/graph/graph_store.hpp"

namespace graphy::graph {

enum class ExportFormat { jsonl, csv_import };

std::optional<ExportFormat> parse_export_format(std::string_view name) noexcept;

/// Writes the graph under `dir` and returns the files written.
///
/// jsonl: `graph.jsonl`. csv-import: `vertex_<label>.csv` per declared label
/// and `edge_<KIND>.csv` per edge kind, header row first, `id` (or
/// `source,target` for edges) leading. Text lists are joined with ';'.
std::vector<std::filesystem::path> export_graph(const GraphStore& store, ExportFormat format,
                                                const std::filesystem::path& dir);

/// Loads a `graph.jsonl` file into `store`.
void import_jsonl(GraphStore& store, const std::filesystem::path& file);

std::string csv_escape(std::string_view field);

}  // namespace graphy::graph
