#include "graphy/shell/app.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "graphy/error.hpp"
#include "graphy/inspection/workflow.hpp"
#include "graphy/providers/config.hpp"

namespace graphy::shell {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool valid_session_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
  }
  return true;
}

void write_atomic(const fs::path& file, const std::string& content) {
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + tmp);
    out << content;
    if (!out.flush()) fail(ErrorCode::IoFailure, "cannot write " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, file, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot replace " + file.string() + ": " + ec.message());
}

}  // namespace

json SessionRecord::to_json() const {
  return json{{"session", session.to_json()}, {"job", job ? job->to_json() : json(nullptr)}};
}

SessionRecord SessionRecord::from_json(const json& j) {
  if (!j.is_object() || !j.contains("session")) fail(ErrorCode::InvalidParams, "session record needs a session");
  SessionRecord r{exploration::Session::from_json(j["session"]), std::nullopt};
  if (j.contains("job") && !j["job"].is_null()) r.job = generation::GenerationJob::from_json(j["job"]);
  return r;
}

SessionStore::SessionStore(fs::path dir, std::chrono::seconds idle) : dir_(std::move(dir)), idle_(idle) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot create " + dir_.string() + ": " + ec.message());
}

fs::path SessionStore::file_of(const std::string& id) const { return dir_ / (id + ".json"); }

void SessionStore::persist(const std::string& id, const SessionRecord& record) const {
  write_atomic(file_of(id), record.to_json().dump(2) + "\n");
}

std::string SessionStore::create() {
  SessionRecord record{exploration::Session(), std::nullopt};
  const auto id = record.session.id();
  persist(id, record);
  auto s = slot(id);
  std::lock_guard lock(s->mutex);
  s->record = std::move(record);
  s->last_active = Clock::now();
  return id;
}

bool SessionStore::exists(const std::string& id) const {
  if (!valid_session_id(id)) return false;
  {
    std::lock_guard lock(mutex_);
    if (slots_.count(id)) return true;
  }
  return fs::exists(file_of(id));
}

std::shared_ptr<SessionStore::Slot> SessionStore::slot(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto& s = slots_[id];
  if (!s) s = std::make_shared<Slot>();
  return s;
}

json SessionStore::with(const std::string& id, const Action& action, bool mutates) {
  if (!exists(id)) fail(ErrorCode::UnknownSession, "no session " + id);
  auto s = slot(id);
  std::lock_guard lock(s->mutex);
  if (!s->record) {
    std::ifstream in(file_of(id));
    if (!in) fail(ErrorCode::UnknownSession, "no session " + id);
    try {
      s->record = SessionRecord::from_json(json::parse(in));
    } catch (const json::exception& e) {
      fail(ErrorCode::IoFailure, "session file " + file_of(id).string() + " is corrupt: " + e.what());
    }
  }
  s->last_active = Clock::now();
  if (!mutates) return action(*s->record);
  SessionRecord working = *s->record;
  auto result = action(working);
  persist(id, working);
  s->record = std::move(working);
  return result;
}

std::size_t SessionStore::evict_idle(Clock::time_point now) {
  std::lock_guard lock(mutex_);
  std::size_t dropped = 0;
  for (auto it = slots_.begin(); it != slots_.end();) {
    std::unique_lock slot_lock(it->second->mutex, std::try_to_lock);
    if (slot_lock.owns_lock() && it->second->record && now - it->second->last_active > idle_) {
      slot_lock.unlock();
      it = slots_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

std::size_t SessionStore::loaded() const {
  std::lock_guard lock(mutex_);
  return slots_.size();
}

void SessionStore::persist_all() {
  std::map<std::string, std::shared_ptr<Slot>> slots;
  {
    std::lock_guard lock(mutex_);
    slots = slots_;
  }
  for (const auto& [id, s] : slots) {
    std::lock_guard lock(s->mutex);
    if (s->record) persist(id, *s->record);
  }
}

App::App(AppConfig config) : config_(std::move(config)) {
  {
    std::ifstream in(config_.workflow);
    if (!in) fail(ErrorCode::ConfigError, "workflow file not found: " + config_.workflow.string());
    std::stringstream text;
    text << in.rdbuf();
    try {
      workflow_ = inspection::parse_workflow_text(text.str());
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, "workflow " + config_.workflow.string() + ": " + e.what());
    }
  }
  providers_ = providers::load_providers(config_.providers, config_.providers_base);
  embedder_ = std::make_unique<providers::HashEmbedder>(config_.embedding_dimension);

  std::error_code ec;
  fs::create_directories(config_.data_dir, ec);
  const auto probe = config_.data_dir / ".write-probe";
  {
    std::ofstream out(probe);
    if (ec || !out) fail(ErrorCode::ConfigError, "data_dir is not writable: " + config_.data_dir.string());
  }
  fs::remove(probe, ec);

  store_ = std::make_unique<graph::GraphStore>(config_.data_dir / "graph");
  sessions_ = std::make_unique<SessionStore>(config_.data_dir / "sessions", config_.session_idle);
  if (config_.repository.kind == RepositoryKind::fixture) {
    repository_ = std::make_unique<navigation::FixtureRepository>(config_.repository.manifest);
  }
}

App::~App() {
  try {
    close();
  } catch (...) {
  }
}

inspection::InspectionServices App::services() const {
  inspection::InspectionServices s;
  s.providers = providers_.get();
  s.embedder = embedder_.get();
  return s;
}

generation::GenerationModel App::generation_model() const {
  return generation::GenerationModel{providers_.get(), config_.generation_model};
}

const navigation::Repository* App::repository() {
  std::lock_guard lock(repository_mutex_);
  if (!repository_ && config_.repository.kind == RepositoryKind::live) {
    repository_ = std::make_unique<navigation::LiveRepository>(config_.repository.live);
  }
  return repository_.get();
}

void App::close() {
  if (closed_) return;
  closed_ = true;
  sessions_->persist_all();
  store_->close();
}

}  // namespace graphy::shell
