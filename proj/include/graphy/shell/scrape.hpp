#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphy/navigation/expand.hpp"
#include "graphy/shell/app.hpp"

namespace graphy::shell {

struct ScrapeSummary {
  std::size_t seeds = 0;
  std::size_t facts = 0;       // facts new to the graph, seeds included
  std::size_t dimensions = 0;  // dimension nodes new to the graph
  std::size_t edges = 0;       // NAVIGATES_TO edges new to the graph
  std::size_t dropped_references = 0;
  std::size_t failed_documents = 0;
  std::vector<std::string> failures;
};

/// Inspects each seed and expands from the seeds under `budget`. A seed that
/// names an existing file is read from disk; any other seed is a title and
/// is resolved during expansion, which needs a repository (ConfigError
/// otherwise). Without a repository only the file seeds are inspected.
ScrapeSummary scrape(App& app, const std::vector<std::string>& seeds, const navigation::ExpansionBudget& budget);

nlohmann::json to_json(const ScrapeSummary& summary);

}  // namespace graphy::shell
