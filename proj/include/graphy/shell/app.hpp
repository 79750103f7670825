#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "graphy/exploration/session.hpp"
#include "graphy/generation/job.hpp"
#include "graphy/inspection/runner.hpp"
#include "graphy/providers/embedder.hpp"
#include "graphy/shell/config.hpp"

namespace graphy::shell {

/// One exploration session and its report job, persisted together.
struct SessionRecord {
  exploration::Session session;
  std::optional<generation::GenerationJob> job;

  nlohmann::json to_json() const;
  static SessionRecord from_json(const nlohmann::json& j);  // throws InvalidParams
};

/// Sessions under `dir/<id>.json`. Actions on one session are serialized;
/// a failed action leaves both memory and disk untouched. Idle sessions are
/// dropped from memory but stay on disk and reload on the next access.
class SessionStore {
 public:
  using Clock = std::chrono::steady_clock;
  using Action = std::function<nlohmann::json(SessionRecord&)>;

  SessionStore(std::filesystem::path dir, std::chrono::seconds idle);

  /// New empty session, persisted immediately.
  std::string create();
  bool exists(const std::string& id) const;

  /// Runs `action` on a copy of the record and commits it (persisting when
  /// `mutates`) only if the action returns. Throws UnknownSession.
  nlohmann::json with(const std::string& id, const Action& action, bool mutates = true);

  /// Drops records idle longer than the configured time. Returns the count.
  std::size_t evict_idle(Clock::time_point now = Clock::now());
  std::size_t loaded() const;
  void persist_all();

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  struct Slot {
    std::mutex mutex;
    std::optional<SessionRecord> record;
    Clock::time_point last_active;
  };

  std::shared_ptr<Slot> slot(const std::string& id);
  std::filesystem::path file_of(const std::string& id) const;
  void persist(const std::string& id, const SessionRecord& record) const;

  std::filesystem::path dir_;
  std::chrono::seconds idle_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
};

/// Everything a command or the service needs, built from an AppConfig.
/// Construction fails fast: the workflow must parse, providers must load and
/// data_dir must be writable.
class App {
 public:
  explicit App(AppConfig config);
  ~App();

  App(const App&) = delete;
  App& operator=(const App&) = delete;

  const AppConfig& config() const noexcept { return config_; }
  graph::GraphStore& store() { return *store_; }
  const inspection::WorkflowSpec& workflow() const noexcept { return workflow_; }
  const providers::ProviderRegistry& providers() const { return *providers_; }
  inspection::InspectionServices services() const;
  generation::GenerationModel generation_model() const;
  /// Null when no repository is configured. Live repositories are built on
  /// first use so offline commands never touch the network.
  const navigation::Repository* repository();
  SessionStore& sessions() { return *sessions_; }

  /// Persists sessions and folds the graph log into its snapshot.
  void close();

 private:
  AppConfig config_;
  inspection::WorkflowSpec workflow_;
  std::shared_ptr<providers::ProviderRegistry> providers_;
  std::unique_ptr<providers::Embedder> embedder_;
  std::unique_ptr<graph::GraphStore> store_;
  std::unique_ptr<SessionStore> sessions_;
  std::unique_ptr<navigation::Repository> repository_;
  std::mutex repository_mutex_;
  bool closed_ = false;
};

}  // namespace graphy::shell
