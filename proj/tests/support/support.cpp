#include "support.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include "graphy/navigation/title.hpp"

namespace graphy::testing {

using graph::NodeKind;
using graph::ValueType;

std::filesystem::path fixture_path(const std::string& relative) { return std::filesystem::path(GRAPHY_FIXTURE_DIR) / relative; }
std::filesystem::path golden_path(const std::string& relative) { return std::filesystem::path(GRAPHY_GOLDEN_DIR) / relative; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("graphy-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string Rng::word(std::size_t min_len, std::size_t max_len) {
  static const char kLetters[] = "abcdefghijklmnopqrstuvwxyz";
  std::size_t len = min_len + index(max_len - min_len + 1);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += kLetters[index(26)];
  return w;
}

std::string Rng::sentence(std::size_t words) {
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) s += ' ';
    s += word(2, 9);
  }
  return s;
}

void declare_paper_schema(graph::GraphStore& store) {
  graph::LabelSchema paper(NodeKind::fact);
  paper.add("title", ValueType::text, true)
      .add("year", ValueType::integer)
      .add("citation_count", ValueType::integer)
      .add("abstract", ValueType::text);
  store.declare_label("Paper", paper);
  graph::LabelSchema challenge(NodeKind::dimension);
  challenge.add("summary", ValueType::text, true);
  store.declare_label("Challenge", challenge);
  graph::LabelSchema solution(NodeKind::dimension);
  solution.add("summary", ValueType::text, true);
  store.declare_label("Solution", solution);
}

namespace {

graph::NodeId add_paper(graph::GraphStore& store, const std::string& title, std::int64_t year, std::int64_t citations,
                        const std::string& abstract) {
  auto id = navigation::canonical_id(title);
  store.upsert_fact(id, "Paper",
                    {{"title", title}, {"year", year}, {"citation_count", citations}, {"abstract", abstract}});
  return id;
}

}  // namespace

DemoGraph build_demo_graph(graph::GraphStore& store) {
  declare_paper_schema(store);
  DemoGraph g;
  g.llama = add_paper(store, "The Llama 3 Herd of Models", 2024, 900,
                      "A new set of foundation models that natively support multilinguality, coding and reasoning.");
  g.safety = add_paper(store, "Llama3 Safety Evaluation Suite", 2024, 12,
                       "A benchmark suite for evaluating safety behaviour of open language models.");
  struct Ref {
    const char* title;
    std::int64_t year;
    std::int64_t citations;
    const char* challenge;
  };
  const Ref refs[] = {
      {"Attention Is All You Need", 2017, 90000, "Recurrent models are hard to parallelize."},
      {"Language Models are Few-Shot Learners", 2020, 30000, "Task-specific fine-tuning needs labelled data."},
      {"Scaling Laws for Neural Language Models", 2020, 3000, "Compute budgets are allocated without guidance."},
      {"Training Language Models to Follow Instructions with Human Feedback", 2022, 8000,
       "Models do not follow user intent."},
      {"LoRA: Low-Rank Adaptation of Large Language Models", 2021, 6000, "Full fine-tuning is too expensive."},
      {"Chain-of-Thought Prompting Elicits Reasoning in Large Language Models", 2022, 5000,
       "Multi-step reasoning remains weak."},
      {"Direct Preference Optimization", 2023, 1500, "Reward modelling is unstable."},
  };
  for (const auto& r : refs) {
    auto id = add_paper(store, r.title, r.year, r.citations, std::string("Abstract of ") + r.title + ".");
    store.add_dimensions(id, "Challenge", {{{"summary", std::string(r.challenge)}}});
    store.link_facts(g.llama, id);
    g.cited.push_back(id);
  }
  store.add_dimensions(g.llama, "Challenge", {{{"summary", std::string("Scaling pre-training to 15T tokens.")}}});
  store.add_dimensions(g.llama, "Solution", {{{"summary", std::string("A dense transformer with careful data curation.")}}});
  store.link_facts(g.safety, g.llama);
  return g;
}

std::vector<graph::NodeId> build_six_papers(graph::GraphStore& store) {
  declare_paper_schema(store);
  struct Row {
    const char* title;
    std::int64_t year;
    const char* challenge;
  };
  const Row rows[] = {
      {"Sparse Retrieval at Scale", 2021, "Retrieval latency"},
      {"Learned Index Structures for Passages", 2021, "Retrieval latency"},
      {"Faithful Summaries from Long Inputs", 2022, "Hallucination"},
      {"Grounded Generation with Citations", 2023, "Hallucination"},
      {"Quantized Inference on Commodity Hardware", 2023, "Retrieval latency"},
      {"Evaluating Survey Generation", 2023, "Evaluation cost"},
  };
  std::vector<graph::NodeId> ids;
  for (const auto& r : rows) {
    auto id = add_paper(store, r.title, r.year, 10, std::string("We study ") + r.title + ".");
    store.add_dimensions(id, "Challenge", {{{"summary", std::string(r.challenge)}}});
    ids.push_back(id);
  }
  return ids;
}

}  // namespace graphy::testing
