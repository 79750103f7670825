#include "graphy/shell/service.hpp"

#include <algorithm>
#include <chrono>
#include <functional>

#include <httplib.h>

#include "graphy/exploration/histogram.hpp"
#include "graphy/generation/job.hpp"

namespace graphy::shell {

using graph::NodeId;
using nlohmann::json;

namespace {

constexpr const char* kPrefix = "/api/v1";
constexpr const char* kSession = "/api/v1/sessions/([A-Za-z0-9_-]+)";

struct Reply {
  Reply() = default;
  Reply(int s, json b) : status(s), body(std::move(b)) {}

  int status = 200;
  json body;
  std::string raw;  // sent verbatim when non-empty
  std::string content_type = "application/json";
  std::string filename;
};

using Handler = std::function<Reply(const httplib::Request&)>;

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j;
  try {
    j = json::parse(req.body);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidParams, std::string("request body is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::InvalidParams, "request body must be a JSON object");
  return j;
}

httplib::Server::Handler wrap(Handler h) {
  return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
    try {
      Reply r = h(req);
      res.status = r.status;
      if (!r.filename.empty()) {
        res.set_header("Content-Disposition", "attachment; filename=\"" + r.filename + "\"");
      }
      res.set_content(r.raw.empty() ? r.body.dump() : r.raw, r.content_type);
    } catch (const Error& e) {
      res.status = http_status(e.code());
      res.set_content(error_body(e.code(), e.what()).dump(), "application/json");
    } catch (const json::exception& e) {
      res.status = 400;
      res.set_content(error_body(ErrorCode::InvalidParams, e.what()).dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(json{{"code", "Internal"}, {"message", e.what()}}.dump(), "application/json");
    }
  };
}

std::string text_field(const json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string()) {
    fail(ErrorCode::InvalidParams, std::string("body needs a text field ") + key);
  }
  return body[key].get<std::string>();
}

std::vector<NodeId> id_list(const json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_array()) {
    fail(ErrorCode::InvalidParams, std::string("body needs an id array ") + key);
  }
  std::vector<NodeId> ids;
  for (const auto& v : body[key]) {
    if (!v.is_string()) fail(ErrorCode::InvalidParams, std::string(key) + " must hold hex ids");
    try {
      ids.push_back(NodeId::from_hex(v.get<std::string>()));
    } catch (const Error& e) {
      fail(ErrorCode::InvalidParams, e.what());
    }
  }
  return ids;
}

json ids_json(const std::vector<NodeId>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(id.hex());
  return out;
}

json nodes_json(const graph::GraphStore& store, const std::vector<NodeId>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(node_json(store.get(id)));
  return out;
}

json canvases_json(const exploration::Session& s) {
  const auto& c = s.canvases();
  auto list = [](const std::set<NodeId>& ids) { return ids_json(std::vector<NodeId>(ids.begin(), ids.end())); };
  return json{{"past", list(c.past)}, {"present", list(c.present)}, {"future", list(c.future)}};
}

generation::GenerationJob& require_job(SessionRecord& rec) {
  if (!rec.job) fail(ErrorCode::InvalidState, "no report job; post an instruction first");
  return *rec.job;
}

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownNode: return 404;
    case ErrorCode::InvalidState:
    case ErrorCode::StaleBucket: return 409;
    case ErrorCode::ProviderFailure:
    case ErrorCode::ParseFailure:
    case ErrorCode::NoProvider:
    case ErrorCode::RepositoryUnavailable: return 502;
    case ErrorCode::IoFailure: return 500;
    default: return 400;
  }
}

json error_body(ErrorCode code, const std::string& message) {
  return json{{"code", std::string(to_string(code))}, {"message", message}};
}

json node_json(const graph::Node& node) {
  json j{{"id", node.id.hex()},
         {"label", node.label},
         {"kind", std::string(graph::to_string(node.kind))},
         {"properties", graph::to_json(node.properties)}};
  if (node.owner) j["owner"] = node.owner->hex();
  return j;
}

Service::Service(App& app) : app_(app), server_(std::make_unique<httplib::Server>()) {
  const auto workers = std::max<std::size_t>(app_.config().workers, 2);
  server_->new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
  // Without SO_REUSEPORT a second server on a taken port fails to bind.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  routes();
}

Service::~Service() {
  try {
    stop();
  } catch (...) {
  }
}

int Service::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) fail(ErrorCode::BindFailure, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void Service::run() {
  janitor_ = std::thread([this] {
    const auto idle = app_.config().session_idle;
    const auto period = std::min<std::chrono::steady_clock::duration>(idle, std::chrono::minutes(1));
    auto next = std::chrono::steady_clock::now() + period;
    while (!stopping_) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      if (std::chrono::steady_clock::now() >= next) {
        app_.sessions().evict_idle();
        next = std::chrono::steady_clock::now() + period;
      }
    }
  });
  server_->listen_after_bind();
}

int Service::start(const std::string& host, int port) {
  const int bound = bind(host, port);
  thread_ = std::thread([this] { run(); });
  server_->wait_until_ready();
  return bound;
}

void Service::stop() {
  if (stopping_.exchange(true)) return;
  server_->stop();
  if (thread_.joinable()) thread_.join();
  if (janitor_.joinable()) janitor_.join();
  app_.sessions().persist_all();
}

void Service::routes() {
  auto& s = *server_;
  App* app = &app_;
  const std::string session = kSession;

  // Runs a session action; `mutates` controls persistence.
  auto on_session = [app](const httplib::Request& req, bool mutates,
                           const std::function<json(SessionRecord&, const json&)>& action) {
    const std::string id = req.matches[1];
    const json body = parse_body(req);
    return Reply{200, app->sessions().with(id, [&](SessionRecord& rec) { return action(rec, body); }, mutates)};
  };

  s.Get(std::string(kPrefix) + "/health", wrap([](const httplib::Request&) { return Reply{200, json{{"status", "ok"}}}; }));

  s.Post(std::string(kPrefix) + "/sessions", wrap([app](const httplib::Request&) {
           const auto id = app->sessions().create();
           return Reply{201, app->sessions().with(id, [](SessionRecord& rec) { return rec.to_json(); }, false)};
         }));

  s.Get(session, wrap([on_session](const httplib::Request& req) {
          return on_session(req, false, [](SessionRecord& rec, const json&) { return rec.to_json(); });
        }));

  s.Post(session + "/search", wrap([on_session, app](const httplib::Request& req) {
           return on_session(req, true, [app](SessionRecord& rec, const json& body) {
             std::vector<exploration::Predicate> preds;
             if (body.contains("predicate") && !body["predicate"].is_null()) {
               preds.push_back(exploration::predicate_from_json(body["predicate"]));
             }
             if (body.contains("predicates")) {
               for (const auto& p : body["predicates"]) preds.push_back(exploration::predicate_from_json(p));
             }
             const auto limit = body.value("limit", exploration::kDefaultPageSize);
             auto page = rec.session.search(app->store(), text_field(body, "label"), std::move(preds), limit);
             json nodes = json::array();
             for (const auto& n : page.nodes) nodes.push_back(node_json(n));
             return json{{"nodes", nodes}, {"total", page.total}};
           });
         }));

  s.Post(session + "/histogram", wrap([on_session, app](const httplib::Request& req) {
           return on_session(req, true, [app](SessionRecord& rec, const json& body) {
             exploration::QueryIR population;
             if (body.contains("population")) {
               population = exploration::query_from_json(body["population"]);
             } else {
               population.match.label = text_field(body, "label");
             }
             return exploration::to_json(rec.session.histogram(app->store(), population, text_field(body, "attribute")));
           });
         }));

  s.Post(session + "/bucket-filter", wrap([on_session, app](const httplib::Request& req) {
           return on_session(req, true, [app](SessionRecord& rec, const json& body) {
             if (!body.contains("bucket")) fail(ErrorCode::InvalidParams, "body needs a bucket");
             auto ids = rec.session.bucket_filter(app->store(), text_field(body, "attribute"),
                                                  exploration::bucket_from_json(body["bucket"]));
             return json{{"ids", ids_json(ids)}, {"nodes", nodes_json(app->store(), ids)}};
           });
         }));

  s.Post(session + "/prequery", wrap([on_session, app](const httplib::Request& req) {
           return on_session(req, true, [app](SessionRecord& rec, const json& body) {
             const auto mode_name = body.value("mode", std::string("histogram"));
             if (mode_name != "histogram" && mode_name != "table") {
               fail(ErrorCode::InvalidParams, "mode must be histogram or table");
             }
             const auto mode = mode_name == "table" ? exploration::ViewMode::table : exploration::ViewMode::histogram;
             const auto attribute = body.value("attribute", std::string());
             const auto columns = body.value("columns", std::vector<std::string>{});
             return exploration::to_json(
                 rec.session.prequery(app->store(), id_list(body, "selected"), mode, attribute, columns));
           });
         }));

  s.Post(session + "/refine", wrap([on_session, app](const httplib::Request& req) {
           return on_session(req, true, [app](SessionRecord& rec, const json& body) {
             json spec = body.value("params", json::object());
             if (!spec.is_object()) fail(ErrorCode::InvalidParams, "params must be an object");
             for (const auto& [k, v] : body.items()) {
               if (k != "params") spec[k] = v;
             }
             auto ids = rec.session.refine(app->store(), exploration::refine_spec_from_json(spec));
             return json{{"future", ids_json(ids)}, {"nodes", nodes_json(app->store(), ids)}};
           });
         }));

  s.Post(session + "/promote", wrap([on_session, app](const httplib::Request& req) {
           return on_session(req, true, [app](SessionRecord& rec, const json& body) {
             rec.session.promote(app->store(), id_list(body, "chosen"));
             return json{{"canvases", canvases_json(rec.session)}};
           });
         }));

  s.Get(session + "/report", wrap([on_session](const httplib::Request& req) {
          return on_session(req, false, [](SessionRecord& rec, const json&) {
            return rec.job ? rec.job->to_json() : json(nullptr);
          });
        }));

  s.Post(session + "/report/intent", wrap([on_session, app](const httplib::Request& req) {
           return on_session(req, true, [app](SessionRecord& rec, const json& body) {
             std::vector<NodeId> selected;
             if (body.contains("selected")) {
               selected = id_list(body, "selected");
             } else {
               const auto& present = rec.session.canvases().present;
               selected.assign(present.begin(), present.end());
             }
             if (selected.empty()) fail(ErrorCode::EmptySelection, "select papers before asking for a report");
             const auto first = app->store().find(selected.front());
             if (!first) fail(ErrorCode::UnknownFact, "unknown fact " + selected.front().hex());
             auto intent = generation::interpret_intent(text_field(body, "instruction"), app->store().schema(),
                                                        first->label, app->generation_model());
             if (!rec.job) rec.job.emplace();
             rec.job->propose_intent(std::move(selected), std::move(intent));
             return rec.job->to_json();
           });
         }));

  s.Post(session + "/report/intent/confirm", wrap([on_session, app](const httplib::Request& req) {
           return on_session(req, true, [app](SessionRecord& rec, const json& body) {
             auto& job = require_job(rec);
             std::optional<generation::ReportIntent> edited;
             if (body.contains("intent") && !body["intent"].is_null()) {
               edited = generation::intent_from_json(body["intent"]);
             }
             job.confirm_intent(edited, app->store().schema());
             return job.to_json();
           });
         }));

  s.Post(session + "/report/mindmap", wrap([on_session, app](const httplib::Request& req) {
           return on_session(req, true, [app](SessionRecord& rec, const json& body) {
             auto& job = require_job(rec);
             if (job.stage() == generation::JobStage::intent_pending) {
               fail(ErrorCode::InvalidState, "confirm the intent before building a mind map");
             }
             auto payload = generation::collect_payload(app->store(), job.selected(), *job.intent());
             const auto batch = body.value("batch_size", generation::default_batch_size(payload));
             auto map = generation::build_mindmap(payload, *job.intent(), app->store().schema(),
                                                  app->generation_model(), batch);
             job.propose_mindmap(std::move(map), batch);
             return job.to_json();
           });
         }));

  s.Post(session + "/report/mindmap/confirm", wrap([on_session, app](const httplib::Request& req) {
           return on_session(req, true, [app](SessionRecord& rec, const json& body) {
             auto& job = require_job(rec);
             if (!job.intent()) fail(ErrorCode::InvalidState, "no intent");
             std::optional<generation::MindMap> edited;
             if (body.contains("mindmap") && !body["mindmap"].is_null()) {
               edited = generation::mindmap_from_json(body["mindmap"]);
             }
             job.confirm_mindmap(edited, generation::collect_payload(app->store(), job.selected(), *job.intent()));
             return job.to_json();
           });
         }));

  s.Post(session + "/report/draft", wrap([on_session, app](const httplib::Request& req) {
           return on_session(req, true, [app](SessionRecord& rec, const json&) {
             auto& job = require_job(rec);
             if (job.stage() != generation::JobStage::mindmap_confirmed &&
                 job.stage() != generation::JobStage::draft_ready) {
               fail(ErrorCode::InvalidState, "confirm the mind map before drafting");
             }
             auto payload = generation::collect_payload(app->store(), job.selected(), *job.intent());
             job.set_draft(generation::write_report(*job.mindmap(), *job.intent(), payload, app->store().schema(),
                                                    app->generation_model()));
             return job.to_json();
           });
         }));

  s.Get(session + "/report/download", wrap([app](const httplib::Request& req) {
          const std::string id = req.matches[1];
          const auto format_name = req.has_param("format") ? req.get_param_value("format") : std::string("markdown");
          Reply reply;
          app->sessions().with(
              id,
              [&](SessionRecord& rec) {
                auto& job = require_job(rec);
                if (!job.draft()) fail(ErrorCode::InvalidState, "no draft yet");
                const auto format = generation::parse_report_format(format_name);
                if (!format) fail(ErrorCode::UnsupportedFormat, "unknown format " + format_name);
                reply.raw = generation::render_report(*job.draft(), *format);
                const bool tex = *format == generation::ReportFormat::latex;
                reply.content_type = tex ? "application/x-tex" : "text/markdown";
                reply.filename = tex ? "report.tex" : "report.md";
                return json();
              },
              false);
          return reply;
        }));

  s.Get(std::string(kPrefix) + "/graph/nodes/([0-9a-fA-F]+)", wrap([app](const httplib::Request& req) {
          NodeId id;
          try {
            id = NodeId::from_hex(std::string(req.matches[1]));
          } catch (const Error&) {
            fail(ErrorCode::UnknownNode, "no node " + std::string(req.matches[1]));
          }
          const auto node = app->store().find(id);
          if (!node) fail(ErrorCode::UnknownNode, "no node " + id.hex());
          json dims = json::array();
          for (const auto& d : app->store().dimensions_of(id)) dims.push_back(node_json(d));
          const auto kind = graph::EdgeKind::navigates_to;
          return Reply{200, json{{"node", node_json(*node)},
                                 {"dimensions", dims},
                                 {"out", ids_json(app->store().neighbors(id, kind, graph::Direction::out))},
                                 {"in", ids_json(app->store().neighbors(id, kind, graph::Direction::in))}}};
        }));

  s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const auto code = res.status == 404 ? "NotFound" : "HttpError";
    res.set_content(json{{"code", code}, {"message", req.method + " " + req.path}}.dump(), "application/json");
  });
}

}  // namespace graphy::shell
