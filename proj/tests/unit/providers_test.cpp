#include <doctest.h>

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "graphy/error.hpp"
#include "graphy/inspection/output_schema.hpp"
#include "graphy/providers/config.hpp"
#include "graphy/providers/http_provider.hpp"
#include "graphy/providers/offline.hpp"
#include "graphy/providers/provider.hpp"
#include "support.hpp"

using namespace graphy;
using namespace graphy::providers;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoFailure;
}

class Named final : public CompletionProvider {
 public:
  explicit Named(std::string name) : name_(std::move(name)) {}
  std::string id() const override { return name_; }
  CompletionResult complete(const CompletionRequest&) const override { return {"from " + name_, std::nullopt, name_}; }

 private:
  std::string name_;
};

inspection::OutputSchema summary_array() {
  return inspection::parse_output_schema(json{{"array_typed", {{"summary", "text"}}}});
}

CompletionRequest request(const std::string& model, const std::string& doc, const std::string& task) {
  CompletionRequest r;
  r.model_id = model;
  r.prompt = "Task: " + task;
  r.doc_id = doc;
  r.task = task;
  r.output_schema = summary_array();
  return r;
}

class EnvGuard {
 public:
  EnvGuard(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    if (value) setenv(name, value, 1);
    else unsetenv(name);
  }
  ~EnvGuard() {
    if (old_) setenv(name_, old_->c_str(), 1);
    else unsetenv(name_);
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

}  // namespace

TEST_CASE("longest prefix routes ollama models locally and the rest to the default") {
  ProviderRegistry reg;
  reg.register_provider("ollama/", std::make_shared<Named>("local"));
  reg.register_provider("", std::make_shared<Named>("cloud"));
  CHECK(reg.route("ollama/qwen2.5:7b").id() == "local");
  CHECK(reg.route("qwen-plus").id() == "cloud");
  CompletionRequest r;
  r.model_id = "ollama/qwen2.5:7b";
  r.prompt = "p";
  CHECK(reg.complete(r).raw_text == "from local");
}

TEST_CASE("registry errors") {
  ProviderRegistry reg;
  reg.register_provider("ollama/", std::make_shared<Named>("local"));
  CompletionRequest r;
  r.model_id = "qwen-plus";
  r.prompt = "p";
  CHECK(code_of([&] { reg.complete(r); }) == ErrorCode::NoProvider);
  CHECK(code_of([&] { reg.register_provider("ollama/", std::make_shared<Named>("again")); }) == ErrorCode::DuplicatePrefix);
  reg.freeze();
  CHECK(code_of([&] { reg.register_provider("x/", std::make_shared<Named>("late")); }) == ErrorCode::InvalidParams);
}

TEST_CASE("scripted provider answers (P1, Challenges) with two items") {
  ProviderRegistry reg;
  reg.register_provider("", std::make_shared<ScriptedProvider>(
                                ScriptedProvider::from_file(testing::fixture_path("providers/scripted_unit.json"))));
  auto result = reg.complete(request("qwen-plus", "P1", "Challenges"));
  REQUIRE(result.parsed);
  CHECK(result.parsed->size() == 2);
  CHECK((*result.parsed)[0]["summary"] == "Supernodes overwhelm the canvas.");
  CHECK(result.provider_id == "scripted");
  auto again = reg.complete(request("qwen-plus", "P1", "Challenges"));
  CHECK(again.raw_text == result.raw_text);
  CHECK(again.parsed->dump() == result.parsed->dump());
}

TEST_CASE("scripted wildcard, fences, repair and failures") {
  ProviderRegistry reg;
  reg.register_provider("", std::make_shared<ScriptedProvider>(
                                ScriptedProvider::from_file(testing::fixture_path("providers/scripted_unit.json"))));
  auto fenced = reg.complete(request("m", "anything", "Solutions"));
  CHECK((*fenced.parsed)[0]["summary"] == "Refine neighbors statistically.");
  auto repaired = reg.complete(request("m", "P1", "Broken"));
  CHECK((*repaired.parsed)[0]["summary"] == "Recovered after repair.");
  CHECK(code_of([&] { reg.complete(request("m", "P1", "Hopeless")); }) == ErrorCode::ParseFailure);
  CHECK(code_of([&] { reg.complete(request("m", "P2", "Challenges")); }) == ErrorCode::ProviderFailure);
  CHECK(code_of([&] { reg.complete(request("m", "P9", "Unknown")); }) == ErrorCode::ProviderFailure);
}

TEST_CASE("repair retry restates the schema exactly once") {
  struct Counting final : CompletionProvider {
    mutable std::vector<CompletionRequest> seen;
    std::string id() const override { return "counting"; }
    CompletionResult complete(const CompletionRequest& r) const override {
      seen.push_back(r);
      return {"[{\"summary\": 5}]", std::nullopt, "counting"};
    }
  };
  auto provider = std::make_shared<Counting>();
  ProviderRegistry reg;
  reg.register_provider("", provider);
  CHECK(code_of([&] { reg.complete(request("m", "d", "t")); }) == ErrorCode::ParseFailure);
  REQUIRE(provider->seen.size() == 2);
  CHECK(provider->seen[0].attempt == 0);
  CHECK(provider->seen[1].attempt == 1);
  CHECK(provider->seen[1].prompt.find("\"summary\"") != std::string::npos);
  CHECK(provider->seen[1].prompt.find("TypeMismatch") != std::string::npos);
}

TEST_CASE("extractive provider returns the one challenge sentence") {
  ExtractiveProvider p;
  CompletionRequest r = request("m", "d", "Challenges");
  r.instruction = "challenges";
  r.context_chunks = {"We present a system. The main challenge is noisy references. Results are good."};
  ProviderRegistry reg;
  reg.register_provider("", std::make_shared<ExtractiveProvider>());
  auto result = reg.complete(r);
  REQUIRE(result.parsed);
  REQUIRE(result.parsed->size() == 1);
  CHECK((*result.parsed)[0]["summary"] == "The main challenge is noisy references.");
}

TEST_CASE("extractive provider ranks by overlap and caps the item count") {
  auto picked = ExtractiveProvider::select_sentences(
      "Please summarize the challenges of retrieval",
      {"Retrieval challenges dominate. Challenges exist. Retrieval is fast. Nothing here.",
       "Challenge one. Challenge two. Challenge three. Challenge four. Challenge five."});
  REQUIRE(picked.size() == ExtractiveProvider::kMaxItems);
  CHECK(picked[0] == "Retrieval challenges dominate.");
  CHECK(picked[1] == "Challenges exist.");
  CHECK(picked[2] == "Retrieval is fast.");
  CHECK(ExtractiveProvider::select_sentences("Please summarize the paper", {"Anything at all."}).empty());
}

TEST_CASE("provider config builds a frozen registry") {
  auto reg = load_providers(json{{"routes",
                                  {{{"prefix", "ollama/"}, {"type", "extractive"}},
                                   {{"prefix", ""}, {"type", "scripted"}, {"fixtures", "scripted_unit.json"}}}}},
                            testing::fixture_path("providers"));
  CHECK(reg->frozen());
  CHECK(reg->route("ollama/qwen2.5:7b").id() == "extractive");
  CHECK(reg->route("qwen-plus").id() == "scripted");
  CHECK(code_of([] { load_providers(json{{"routes", {{{"prefix", ""}, {"type", "bogus"}}}}}); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { load_providers(json::object()); }) == ErrorCode::ConfigError);
  CHECK(code_of([] {
          load_providers(json{{"routes", {{{"prefix", ""}, {"type", "extractive"}}, {{"prefix", ""}, {"type", "extractive"}}}}});
        }) == ErrorCode::DuplicatePrefix);
}

TEST_CASE("offline mode forbids the http provider") {
  EnvGuard guard("GRAPHY_OFFLINE", "1");
  CHECK(code_of([] {
          load_providers(json{{"routes", {{{"prefix", ""}, {"type", "http"}, {"endpoint", "http://127.0.0.1:1"}}}}});
        }) == ErrorCode::ConfigError);
}

TEST_CASE("http provider speaks the chat-completion protocol") {
  EnvGuard guard("GRAPHY_OFFLINE", nullptr);
  EnvGuard key("GRAPHY_TEST_KEY", "secret");
  httplib::Server server;
  json seen;
  std::string auth;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    auth = req.get_header_value("Authorization");
    json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "[{\"summary\":\"ok\"}]"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  server.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpProviderConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port);
  cfg.api_key_env = "GRAPHY_TEST_KEY";
  cfg.strip_prefix = "ollama/";
  ProviderRegistry reg;
  reg.register_provider("ollama/", std::make_shared<HttpProvider>(cfg));
  auto r = request("ollama/qwen2.5:7b", "d", "Challenges");
  r.context_chunks = {"chunk one"};
  auto result = reg.complete(r);
  CHECK((*result.parsed)[0]["summary"] == "ok");
  CHECK(seen["model"] == "qwen2.5:7b");
  CHECK(seen["messages"][0]["content"].get<std::string>().find("chunk one") != std::string::npos);
  CHECK(auth == "Bearer secret");

  cfg.path = "/broken";
  HttpProvider broken(cfg);
  CHECK(code_of([&] { broken.complete(r); }) == ErrorCode::ProviderFailure);
  server.stop();
  t.join();
  HttpProvider down(cfg);
  CHECK(code_of([&] { down.complete(r); }) == ErrorCode::ProviderFailure);
}
