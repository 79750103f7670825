#include "demo_flow.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <regex>
#include <stdexcept>
#include <thread>

#include <httplib.h>

#include "support.hpp"

namespace graphy::testing {

using nlohmann::json;

std::filesystem::path write_offline_config(const std::filesystem::path& dir, const std::filesystem::path& data_dir) {
  const json config{{"data_dir", data_dir.string()},
                    {"workflow", fixture_path("repo20/workflow.json").string()},
                    {"providers", {{"routes", json::array({{{"prefix", ""}, {"type", "extractive"}}})}}},
                    {"repository", {{"type", "fixture"}, {"manifest", fixture_path("repo20/manifest.json").string()}}},
                    {"server", {{"host", "127.0.0.1"}, {"port", 0}}},
                    {"workers", 4},
                    {"generation_model", ""}};
  const auto file = dir / "graphy.json";
  write_file(file, config.dump(2));
  return file;
}

namespace {

struct Step {
  httplib::Client& client;
  DemoFlowResult& result;

  std::optional<json> call(const std::string& name, const std::string& method, const std::string& path,
                           const json& body = json::object(), int expected = 200) {
    httplib::Result r = method == "GET" ? client.Get(path) : client.Post(path, body.dump(), "application/json");
    if (!r) {
      result.failures.push_back(name + ": no response (" + httplib::to_string(r.error()) + ")");
      return std::nullopt;
    }
    if (r->status != expected) {
      result.failures.push_back(name + ": status " + std::to_string(r->status) + " " + r->body);
      return std::nullopt;
    }
    try {
      return json::parse(r->body);
    } catch (const json::exception&) {
      return json(r->body);
    }
  }

  void expect(bool ok, const std::string& what) {
    if (!ok) result.failures.push_back(what);
  }
};

}  // namespace

DemoFlowResult run_demo_flow(const std::string& host, int port) {
  DemoFlowResult result;
  httplib::Client client(host, port);
  client.set_read_timeout(10, 0);
  Step step{client, result};

  const auto created = step.call("create session", "POST", "/api/v1/sessions", json::object(), 201);
  if (!created) return result;
  result.session_id = (*created)["session"]["session_id"].get<std::string>();
  const std::string base = "/api/v1/sessions/" + result.session_id;

  const auto found = step.call("search", "POST", base + "/search",
                               {{"label", "Paper"}, {"predicate", {{"op", "contains"}, {"attribute", "title"}, {"value", "Llama3"}}}});
  if (!found) return result;
  std::string llama;
  for (const auto& n : (*found)["nodes"]) {
    if (n["properties"]["title"] == "The Llama 3 Herd of Models") llama = n["id"];
  }
  step.expect(!llama.empty(), "search: the Llama 3 paper is not staged");
  if (llama.empty()) return result;

  if (!step.call("promote seed", "POST", base + "/promote", {{"chosen", {llama}}})) return result;

  const auto view = step.call("prequery", "POST", base + "/prequery",
                              {{"selected", {llama}}, {"mode", "table"}, {"columns", {"title", "year", "citation_count"}}});
  if (!view) return result;
  step.expect((*view)["total"].get<std::size_t>() > 3, "prequery: fewer than four neighbors");

  const auto refined = step.call("refine", "POST", base + "/refine",
                                 {{"mode", "table"}, {"params", {{"attribute", "citation_count"}, {"direction", "desc"}, {"top_k", 3}}}});
  if (!refined) return result;
  const auto future = (*refined)["future"];
  step.expect(future.size() == 3, "refine: top-3 did not return three papers");

  const auto promoted = step.call("promote top-k", "POST", base + "/promote", {{"chosen", future}});
  if (!promoted) return result;
  step.expect((*promoted)["canvases"]["past"] == json::array({llama}), "promote: the seed did not move to past");
  result.selected = (*promoted)["canvases"]["present"].get<std::vector<std::string>>();

  const auto intent = step.call("intent", "POST", base + "/report/intent",
                                {{"instruction", "Please write me a related work, focusing on their challenge"}});
  if (!intent) return result;
  step.expect((*intent)["intent"]["required_dimensions"] == json::array({"Challenge"}), "intent: Challenge not inferred");
  if (!step.call("confirm intent", "POST", base + "/report/intent/confirm")) return result;
  const auto map = step.call("mindmap", "POST", base + "/report/mindmap");
  if (!map) return result;
  step.expect(!(*map)["mindmap"]["categories"].empty(), "mindmap: no categories");
  if (!step.call("confirm mindmap", "POST", base + "/report/mindmap/confirm")) return result;
  if (!step.call("draft", "POST", base + "/report/draft")) return result;

  for (const auto& [format, target] : {std::pair<std::string, std::string*>{"latex", &result.tex},
                                       std::pair<std::string, std::string*>{"markdown", &result.markdown}}) {
    auto r = client.Get(base + "/report/download?format=" + format);
    if (!r || r->status != 200) {
      result.failures.push_back("download " + format + ": " + (r ? r->body : std::string("no response")));
      return result;
    }
    *target = r->body;
  }
  step.expect(!result.tex.empty(), "download: empty TeX");

  const auto state = step.call("state", "GET", base);
  if (state) result.final_state = *state;
  return result;
}

}  // namespace graphy::testing

namespace graphy::testing {

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace

CliResult run_cli(const std::vector<std::string>& args) {
  TempDir io;
  std::string cmd = "GRAPHY_OFFLINE=1 " + shell_quote(GRAPHY_CLI);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  cmd += " >" + shell_quote((io.path() / "out").string()) + " 2>" + shell_quote((io.path() / "err").string());
  CliResult r;
  const int status = std::system(cmd.c_str());
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(io.path() / "out");
  r.err = read_file(io.path() / "err");
  return r;
}

}  // namespace graphy::testing

namespace graphy::testing {

ServerProcess::ServerProcess(const std::filesystem::path& config, int timeout_s) {
  int fds[2];
  if (pipe(fds) != 0) throw std::runtime_error("pipe failed");
  pid_ = fork();
  if (pid_ < 0) throw std::runtime_error("fork failed");
  if (pid_ == 0) {
    dup2(fds[1], STDOUT_FILENO);
    close(fds[0]);
    close(fds[1]);
    setenv("GRAPHY_OFFLINE", "1", 1);
    const std::string cfg = config.string();
    execl(GRAPHY_CLI, GRAPHY_CLI, "serve", "--config", cfg.c_str(), "--port", "0", static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  // Read until the listening line; the pipe stays open so later output cannot raise SIGPIPE.
  std::string line;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(timeout_s);
  char c;
  while (std::chrono::steady_clock::now() < deadline) {
    const auto n = read(fds[0], &c, 1);
    if (n <= 0) break;
    if (c != '\n') {
      line += c;
      continue;
    }
    std::smatch m;
    if (std::regex_search(line, m, std::regex(R"(listening on http://[^:]+:(\d+))"))) {
      port_ = std::stoi(m[1]);
      break;
    }
    line.clear();
  }
  out_fd_ = fds[0];
  if (port_ == 0) {
    stop();
    throw std::runtime_error("server did not report a port");
  }
}

ServerProcess::~ServerProcess() { stop(); }

int ServerProcess::stop() {
  if (pid_ <= 0) return exit_code_;
  kill(pid_, SIGTERM);
  int status = 0;
  waitpid(pid_, &status, 0);
  pid_ = -1;
  if (out_fd_ >= 0) close(out_fd_);
  out_fd_ = -1;
  exit_code_ = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return exit_code_;
}

}  // namespace graphy::testing
