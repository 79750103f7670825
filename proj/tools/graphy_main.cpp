#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "graphy/error.hpp"
#include "graphy/generation/job.hpp"
#include "graphy/graph/export.hpp"
#include "graphy/navigation/title.hpp"
#include "graphy/shell/scrape.hpp"
#include "graphy/shell/service.hpp"

namespace {

using namespace graphy;

constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::MalformedConfig:
    case ErrorCode::DuplicateNodeName:
    case ErrorCode::UnknownEdgeEndpoint:
    case ErrorCode::CycleDetected:
    case ErrorCode::DuplicatePrefix:
    case ErrorCode::UnsupportedFormat: return true;
    default: return false;
  }
}

graph::NodeId resolve_selection(const std::string& s) {
  const bool hex = s.size() == 32 && s.find_first_not_of("0123456789abcdefABCDEF") == std::string::npos;
  return hex ? graph::NodeId::from_hex(s) : navigation::canonical_id(s);
}

int run_scrape(const std::string& config, const std::vector<std::string>& seeds,
               std::optional<navigation::ExpansionBudget> budget, bool as_json) {
  shell::App app(shell::load_config(config));
  const auto summary = shell::scrape(app, seeds, budget.value_or(app.config().budget));
  app.close();
  if (as_json) {
    std::cout << shell::to_json(summary).dump(2) << "\n";
  } else {
    std::cout << "seeds: " << summary.seeds << "\n"
              << "facts: " << summary.facts << "\n"
              << "dimensions: " << summary.dimensions << "\n"
              << "edges: " << summary.edges << "\n"
              << "dropped_references: " << summary.dropped_references << "\n"
              << "failed_documents: " << summary.failed_documents << "\n";
    for (const auto& f : summary.failures) std::cerr << "failed: " << f << "\n";
  }
  return 0;
}

int run_export(const std::string& config, const std::string& format_name, const std::string& out_dir) {
  const auto format = graph::parse_export_format(format_name);
  if (!format) {
    std::cerr << "unknown export format: " << format_name << " (expected jsonl or csv-import)\n";
    return kUsageError;
  }
  shell::App app(shell::load_config(config));
  for (const auto& f : graph::export_graph(app.store(), *format, out_dir)) std::cout << f.string() << "\n";
  app.close();
  return 0;
}

int run_import(const std::string& config, const std::string& file) {
  shell::App app(shell::load_config(config));
  graph::import_jsonl(app.store(), file);
  std::cout << "nodes: " << app.store().node_count() << "\n" << "edges: " << app.store().edge_count() << "\n";
  app.close();
  return 0;
}

int run_serve(const std::string& config, std::optional<std::string> host, std::optional<int> port) {
  shell::App app(shell::load_config(config));
  shell::Service service(app);
  const auto h = host.value_or(app.config().host);
  const int bound = service.start(h, port.value_or(app.config().port));
  std::cout << "listening on http://" << h << ":" << bound << "/api/v1" << std::endl;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  service.stop();
  app.close();
  std::cout << "stopped" << std::endl;
  return 0;
}

int run_report(const std::string& config, const std::string& instruction, const std::vector<std::string>& selection,
               const std::string& format_name, const std::string& out) {
  const auto format = generation::parse_report_format(format_name);
  if (!format) {
    std::cerr << "unknown report format: " << format_name << " (expected markdown or latex)\n";
    return kUsageError;
  }
  shell::App app(shell::load_config(config));
  std::vector<graph::NodeId> selected;
  for (const auto& s : selection) selected.push_back(resolve_selection(s));
  const auto schema = app.store().schema();
  const auto first = app.store().find(selected.front());
  if (!first) fail(ErrorCode::UnknownFact, "unknown fact " + selection.front());
  const auto model = app.generation_model();

  generation::GenerationJob job;
  job.propose_intent(selected, generation::interpret_intent(instruction, schema, first->label, model));
  job.confirm_intent(std::nullopt, schema);
  auto payload = generation::collect_payload(app.store(), job.selected(), *job.intent());
  const auto batch = generation::default_batch_size(payload);
  job.propose_mindmap(generation::build_mindmap(payload, *job.intent(), schema, model, batch), batch);
  job.confirm_mindmap(std::nullopt, payload);
  job.set_draft(generation::write_report(*job.mindmap(), *job.intent(), payload, schema, model));
  const auto text = generation::render_report(*job.draft(), *format);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!(file << text)) fail(ErrorCode::IoFailure, "cannot write " + out);
    std::cout << out << "\n";
  }
  for (const auto& w : job.mindmap()->warnings) std::cerr << "warning: " << w << "\n";
  app.close();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Build, explore and report on a document knowledge graph"};
  cli.require_subcommand(1);
  std::string config;

  auto* scrape = cli.add_subcommand("scrape", "Inspect seed documents or titles and expand along their references");
  std::vector<std::string> seeds;
  std::optional<std::size_t> depth, max_new, ref_cap;
  bool as_json = false;
  scrape->add_option("--config", config, "Config file")->required();
  scrape->add_option("seeds", seeds, "Document paths or titles");
  scrape->add_option("--depth", depth, "Expansion depth");
  scrape->add_option("--max-new", max_new, "Maximum new facts");
  scrape->add_option("--ref-cap", ref_cap, "References followed per fact");
  scrape->add_flag("--json", as_json, "Print the summary as JSON");

  auto* exp = cli.add_subcommand("export", "Write the graph as jsonl or csv-import files");
  std::string format = "jsonl", out_dir = "export";
  exp->add_option("--config", config, "Config file")->required();
  exp->add_option("--format", format, "jsonl or csv-import");
  exp->add_option("--out", out_dir, "Output directory");

  auto* imp = cli.add_subcommand("import", "Load a graph.jsonl file into the configured graph");
  std::string import_file;
  imp->add_option("--config", config, "Config file")->required();
  imp->add_option("file", import_file, "graph.jsonl")->required();

  auto* serve = cli.add_subcommand("serve", "Serve the REST API");
  std::optional<std::string> host;
  std::optional<int> port;
  serve->add_option("--config", config, "Config file")->required();
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)");

  auto* report = cli.add_subcommand("report", "Write a report over selected facts without confirmation steps");
  std::string instruction, report_format = "markdown", report_out;
  std::vector<std::string> selection;
  report->add_option("--config", config, "Config file")->required();
  report->add_option("--instruction", instruction, "What to write")->required();
  report->add_option("--select", selection, "Fact ids or exact titles")->required();
  report->add_option("--format", report_format, "markdown or latex");
  report->add_option("--out", report_out, "Output file (stdout when empty)");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return kUsageError;
  }

  try {
    if (*scrape) {
      std::optional<navigation::ExpansionBudget> budget;
      if (depth || max_new || ref_cap) {
        budget = shell::load_config(config).budget;
        if (depth) budget->max_depth = *depth;
        if (max_new) budget->max_new_facts = *max_new;
        if (ref_cap) budget->per_fact_reference_cap = *ref_cap;
      }
      return run_scrape(config, seeds, budget, as_json);
    }
    if (*exp) return run_export(config, format, out_dir);
    if (*imp) return run_import(config, import_file);
    if (*serve) return run_serve(config, host, port);
    if (*report) return run_report(config, instruction, selection, report_format, report_out);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return is_config_error(e.code()) ? kUsageError : kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
