#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "graphy/graph/graph_store.hpp"

namespace graphy::testing {

std::filesystem::path fixture_path(const std::string& relative);
std::filesystem::path golden_path(const std::string& relative);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Seeded generator shared by property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
  long long between(long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(engine_); }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  bool chance(double p) { return unit() < p; }
  std::string word(std::size_t min_len = 1, std::size_t max_len = 8);
  std::string sentence(std::size_t words);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Paper{title req, year, citation_count, abstract}, Challenge{summary req},
/// Solution{summary req}.
void declare_paper_schema(graph::GraphStore& store);

struct DemoGraph {
  graph::NodeId llama;    // "The Llama 3 Herd of Models", cites 7 papers
  graph::NodeId safety;   // "Llama3 Safety Evaluation Suite"
  std::vector<graph::NodeId> cited;
};

/// Small survey graph used by exploration and shell tests.
DemoGraph build_demo_graph(graph::GraphStore& store);

/// Six papers with years {2021,2021,2022,2023,2023,2023} and Challenge texts
/// forming three distinct values with multiplicities {3,2,1}.
std::vector<graph::NodeId> build_six_papers(graph::GraphStore& store);

}  // namespace graphy::testing
