#pragma once

#include <string>

#include "graphy/graph/graph_store.hpp"

namespace graphy::testing {

/// Runs the listing workflow (Abstract, Challenges -> Solutions) over the
/// five corpus documents with the scripted provider and materializes them.
void scrape_corpus5(graph::GraphStore& store);

/// write_jsonl of a fresh store after scrape_corpus5.
std::string corpus5_jsonl();

}  // namespace graphy::testing
