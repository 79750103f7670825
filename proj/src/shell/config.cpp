#include "graphy/shell/config.hpp"

#include <fstream>

#include "graphy/error.hpp"

namespace graphy::shell {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

json read_json_file(const fs::path& file, const std::string& what) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::ConfigError, what + " not found: " + file.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, what + " " + file.string() + " is not valid JSON: " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::ConfigError, std::string("config key ") + key + " has the wrong type");
  }
}

RepositoryConfig parse_repository(const json& j, const fs::path& base) {
  RepositoryConfig r;
  if (j.is_null()) return r;
  if (!j.is_object()) fail(ErrorCode::ConfigError, "repository must be an object");
  const auto type = get_or<std::string>(j, "type", "none");
  if (type == "none") return r;
  if (type == "fixture") {
    r.kind = RepositoryKind::fixture;
    if (!j.contains("manifest")) fail(ErrorCode::ConfigError, "fixture repository needs a manifest");
    r.manifest = resolve(base, get_or<std::string>(j, "manifest", ""));
    return r;
  }
  if (type == "live") {
    r.kind = RepositoryKind::live;
    r.live.endpoint = get_or<std::string>(j, "endpoint", r.live.endpoint);
    r.live.min_interval = std::chrono::milliseconds(get_or<long long>(j, "min_interval_ms", r.live.min_interval.count()));
    r.live.max_results = get_or<std::size_t>(j, "max_results", r.live.max_results);
    if (j.contains("cache_dir")) r.live.cache_dir = resolve(base, get_or<std::string>(j, "cache_dir", ""));
    return r;
  }
  fail(ErrorCode::ConfigError, "unknown repository type " + type);
}

}  // namespace

AppConfig parse_config(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) fail(ErrorCode::ConfigError, "config must be a JSON object");
  AppConfig c;
  c.data_dir = resolve(base_dir, get_or<std::string>(j, "data_dir", "data"));
  if (!j.contains("workflow")) fail(ErrorCode::ConfigError, "config needs a workflow path");
  c.workflow = resolve(base_dir, get_or<std::string>(j, "workflow", ""));

  c.providers_base = base_dir;
  if (j.contains("providers")) {
    const auto& p = j["providers"];
    if (p.is_string()) {
      const auto file = resolve(base_dir, p.get<std::string>());
      c.providers = read_json_file(file, "providers file");
      c.providers_base = file.parent_path();
    } else if (p.is_object()) {
      c.providers = p;
    } else {
      fail(ErrorCode::ConfigError, "providers must be a file path or a routes object");
    }
  } else {
    c.providers = json{{"routes", json::array({{{"prefix", ""}, {"type", "extractive"}}})}};
  }

  c.repository = parse_repository(j.value("repository", json()), base_dir);
  if (j.contains("server")) {
    const auto& s = j["server"];
    c.host = get_or<std::string>(s, "host", c.host);
    c.port = get_or<int>(s, "port", c.port);
  }
  if (c.port < 0 || c.port > 65535) fail(ErrorCode::ConfigError, "server port out of range");
  c.workers = get_or<std::size_t>(j, "workers", c.workers);
  if (c.workers == 0) fail(ErrorCode::ConfigError, "workers must be at least 1");
  const auto idle = get_or<double>(j, "session_idle_hours", 24.0);
  if (idle <= 0) fail(ErrorCode::ConfigError, "session_idle_hours must be positive");
  c.session_idle = std::chrono::seconds(static_cast<long long>(idle * 3600));
  c.generation_model = get_or<std::string>(j, "generation_model", "");
  if (j.contains("budget")) {
    const auto& b = j["budget"];
    c.budget.max_depth = get_or<std::size_t>(b, "max_depth", c.budget.max_depth);
    c.budget.max_new_facts = get_or<std::size_t>(b, "max_new_facts", c.budget.max_new_facts);
    c.budget.per_fact_reference_cap = get_or<std::size_t>(b, "per_fact_reference_cap", c.budget.per_fact_reference_cap);
  }
  c.embedding_dimension = get_or<std::size_t>(j, "embedding_dimension", c.embedding_dimension);
  if (c.embedding_dimension == 0) fail(ErrorCode::ConfigError, "embedding_dimension must be positive");
  return c;
}

AppConfig load_config(const fs::path& file) {
  return parse_config(read_json_file(file, "config file"), fs::absolute(file).parent_path());
}

}  // namespace graphy::shell
