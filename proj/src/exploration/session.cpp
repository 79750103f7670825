#include "graphy/exploration/session.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <random>

#include "graphy/error.hpp"

namespace graphy::exploration {

using nlohmann::json;

namespace {

json ids_json(const std::vector<NodeId>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(id.hex());
  return out;
}

json ids_json(const std::set<NodeId>& ids) { return ids_json(std::vector<NodeId>(ids.begin(), ids.end())); }

std::vector<NodeId> ids_from(const json& j, const char* what) {
  if (!j.is_array()) fail(ErrorCode::InvalidParams, std::string(what) + " must be an array of node ids");
  std::vector<NodeId> out;
  for (const auto& v : j) {
    if (!v.is_string() || !NodeId::is_valid_hex(v.get<std::string>())) {
      fail(ErrorCode::InvalidParams, std::string(what) + " contains a malformed node id");
    }
    out.push_back(NodeId::from_hex(v.get<std::string>()));
  }
  return out;
}

std::vector<NodeId> sorted_unique(std::vector<NodeId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

const graph::LabelSchema& label_schema(const graph::GraphSchema& schema, const std::string& label) {
  return schema.at(label);
}

void require_attribute(const graph::GraphSchema& schema, const std::string& label, const std::string& attribute) {
  if (!label_schema(schema, label).find(attribute)) {
    fail(ErrorCode::UnknownAttribute, "label " + label + " has no attribute " + attribute);
  }
}

std::string random_id() {
  std::random_device rd;
  std::mt19937_64 gen((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
  return NodeId::hash_of(std::to_string(gen()) + utc_timestamp()).hex();
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string_view to_string(ViewMode mode) noexcept { return mode == ViewMode::histogram ? "histogram" : "table"; }

Session::Session(std::string id) : id_(id.empty() ? random_id() : std::move(id)), created_(utc_timestamp()) {}

std::string Session::default_attribute(const graph::GraphSchema& schema, const std::string& label) {
  const auto& ls = label_schema(schema, label);
  if (ls.find("year")) return "year";
  if (ls.keys().empty()) fail(ErrorCode::UnknownAttribute, "label " + label + " has no attributes");
  return ls.keys().front();
}

void Session::log(std::string action, json params, QueryIR ir, const std::string& ts) {
  history_.push_back(HistoryEntry{std::move(action), std::move(params), std::move(ir), ts});
}

SearchPage Session::search(const graph::GraphStore& store, const std::string& label, std::vector<Predicate> predicates,
                           std::size_t limit) {
  json preds = json::array();
  for (const auto& p : predicates) preds.push_back(exploration::to_json(p));
  return run_search(store, json{{"label", label}, {"predicates", preds}, {"limit", limit}}, utc_timestamp());
}

SearchPage Session::run_search(const graph::GraphStore& store, const json& params, const std::string& ts) {
  QueryIR ir;
  ir.match.label = params.at("label").get<std::string>();
  for (const auto& p : params.at("predicates")) ir.filters.push_back(predicate_from_json(p));
  const auto limit = params.at("limit").get<std::size_t>();
  if (limit < 1) fail(ErrorCode::InvalidParams, "limit must be at least 1");
  ir.limit = limit;
  auto result = execute(store, ir);
  SearchPage page{std::move(result.rows), result.total};
  std::vector<NodeId> staged;
  for (const auto& n : page.nodes) staged.push_back(n.id);
  staging_ = std::move(staged);
  log("search", params, std::move(ir), ts);
  return page;
}

Histogram Session::histogram(const graph::GraphStore& store, const QueryIR& population, const std::string& attribute) {
  return run_histogram(store, json{{"population", exploration::to_json(population)}, {"attribute", attribute}},
                       utc_timestamp());
}

Histogram Session::run_histogram(const graph::GraphStore& store, const json& params, const std::string& ts) {
  const QueryIR population = query_from_json(params.at("population"));
  const auto attribute = params.at("attribute").get<std::string>();
  auto h = attribute_histogram(store, population, attribute);
  last_histogram_ = HistogramState{population, attribute};
  log("histogram", params, h.ir, ts);
  return h;
}

std::vector<NodeId> Session::bucket_filter(const graph::GraphStore& store, const std::string& attribute,
                                           const HistogramBucket& bucket) {
  return run_bucket_filter(store, json{{"attribute", attribute}, {"bucket", exploration::to_json(bucket)}},
                           utc_timestamp());
}

std::vector<NodeId> Session::run_bucket_filter(const graph::GraphStore& store, const json& params,
                                               const std::string& ts) {
  if (!last_histogram_) fail(ErrorCode::InvalidState, "no histogram has been computed in this session");
  const auto attribute = params.at("attribute").get<std::string>();
  if (attribute != last_histogram_->attribute) {
    fail(ErrorCode::StaleBucket, "the bucket belongs to a histogram over another attribute");
  }
  const auto bucket = bucket_from_json(params.at("bucket"));
  auto ids = filter_by_bucket(store, last_histogram_->population, attribute, bucket);
  staging_ = ids;
  log("bucket_filter", params, bucket_query(last_histogram_->population, attribute, {bucket.key}), ts);
  return ids;
}

RefinerView Session::prequery(const graph::GraphStore& store, const std::vector<NodeId>& selected, ViewMode mode,
                              const std::string& attribute, const std::vector<std::string>& columns) {
  json params{{"selected", ids_json(selected)}, {"mode", to_string(mode)}};
  if (!attribute.empty()) params["attribute"] = attribute;
  if (!columns.empty()) params["columns"] = columns;
  return run_prequery(store, params, utc_timestamp());
}

RefinerView Session::run_prequery(const graph::GraphStore& store, const json& params, const std::string& ts) {
  const auto selected = sorted_unique(ids_from(params.at("selected"), "selected"));
  if (selected.empty()) fail(ErrorCode::EmptySelection, "select at least one node on the present canvas");
  for (const auto& id : selected) {
    if (!canvases_.present.count(id)) fail(ErrorCode::InvalidParams, "node " + id.hex() + " is not on the present canvas");
  }
  const std::string mode_name = params.value("mode", "histogram");
  if (mode_name != "histogram" && mode_name != "table") fail(ErrorCode::InvalidParams, "unknown view mode " + mode_name);
  const auto schema = store.schema();

  RefinerView view;
  view.label = store.get(selected.front()).label;
  view.mode = mode_name == "histogram" ? ViewMode::histogram : ViewMode::table;

  QueryIR ir;
  ir.match.label = view.label;
  ir.match.edge = EdgePattern{graph::EdgeKind::navigates_to, graph::Direction::out};
  ir.match.anchors = selected;
  std::set<NodeId> explored = canvases_.past;
  explored.insert(canvases_.present.begin(), canvases_.present.end());
  ir.match.exclude.assign(explored.begin(), explored.end());
  for (const auto& n : population(store, ir)) view.population.push_back(n.id);
  view.total = view.population.size();

  if (view.mode == ViewMode::histogram) {
    view.attribute = params.contains("attribute") ? params["attribute"].get<std::string>()
                                                  : default_attribute(schema, view.label);
    require_attribute(schema, view.label, view.attribute);
    auto h = attribute_histogram(store, QueryIR::of_ids(view.label, view.population), view.attribute);
    view.buckets = std::move(h.buckets);
    ir.aggregate = Aggregate{view.attribute, h.ir.aggregate->bins};
  } else {
    if (params.contains("columns")) {
      view.columns = params["columns"].get<std::vector<std::string>>();
      for (const auto& c : view.columns) require_attribute(schema, view.label, c);
    } else {
      view.columns = label_schema(schema, view.label).keys();
    }
    for (const auto& id : view.population) {
      const auto node = store.get(id);
      TableRow row{id, {}};
      for (const auto& c : view.columns) {
        auto it = node.properties.find(c);
        if (it != node.properties.end()) row.values.emplace(c, it->second);
      }
      view.rows.push_back(std::move(row));
    }
  }
  view_ = view;
  canvases_.future.clear();
  log("prequery", params, std::move(ir), ts);
  return view;
}

std::vector<NodeId> Session::refine(const graph::GraphStore& store, const RefineSpec& spec) {
  return run_refine(store, exploration::to_json(spec), utc_timestamp());
}

std::vector<NodeId> Session::run_refine(const graph::GraphStore& store, const json& params, const std::string& ts) {
  if (!view_) fail(ErrorCode::InvalidState, "refine needs a prequery view");
  const auto spec = refine_spec_from_json(params);
  const auto schema = store.schema();
  const QueryIR population = QueryIR::of_ids(view_->label, view_->population);
  QueryIR ir;
  std::vector<NodeId> chosen;
  if (const auto* h = std::get_if<HistogramSelect>(&spec)) {
    std::string attribute = h->attribute;
    if (attribute.empty()) {
      attribute = view_->mode == ViewMode::histogram ? view_->attribute : default_attribute(schema, view_->label);
    }
    require_attribute(schema, view_->label, attribute);
    if (h->keys.empty()) {
      ir = population;
    } else {
      ir = bucket_query(population, attribute, h->keys);
      for (const auto& n : exploration::population(store, ir)) chosen.push_back(n.id);
    }
  } else {
    const auto& t = std::get<TableSelect>(spec);
    require_attribute(schema, view_->label, t.attribute);
    if (t.top_k < 1) fail(ErrorCode::InvalidParams, "top_k must be at least 1");
    ir = population;
    ir.sort = Sort{t.attribute, t.direction};
    ir.limit = t.top_k;
    for (const auto& n : execute(store, ir).rows) chosen.push_back(n.id);
  }
  canvases_.future = std::set<NodeId>(chosen.begin(), chosen.end());
  log("refine", params, std::move(ir), ts);
  return chosen;
}

void Session::promote(const graph::GraphStore& store, const std::vector<NodeId>& chosen) {
  run_promote(store, json{{"chosen", ids_json(chosen)}}, utc_timestamp());
}

void Session::run_promote(const graph::GraphStore& store, const json& params, const std::string& ts) {
  const auto chosen = sorted_unique(ids_from(params.at("chosen"), "chosen"));
  if (chosen.empty()) fail(ErrorCode::EmptySelection, "choose at least one node");
  const std::set<NodeId> staged(staging_.begin(), staging_.end());
  for (const auto& id : chosen) {
    if (!canvases_.future.count(id) && !staged.count(id)) {
      fail(ErrorCode::NotInFuture, "node " + id.hex() + " is neither a refiner result nor a search result");
    }
  }
  const auto label = store.get(chosen.front()).label;
  for (const auto& id : canvases_.present) canvases_.past.insert(id);
  for (const auto& id : chosen) canvases_.past.erase(id);
  canvases_.present = std::set<NodeId>(chosen.begin(), chosen.end());
  canvases_.future.clear();
  view_.reset();
  log("promote", params, QueryIR::of_ids(label, chosen), ts);
}

Session Session::replay(const graph::GraphStore& store, const Session& original) {
  Session s(original.id_);
  s.created_ = original.created_;
  for (const auto& e : original.history_) {
    if (e.action == "search") {
      s.run_search(store, e.params, e.timestamp);
    } else if (e.action == "histogram") {
      s.run_histogram(store, e.params, e.timestamp);
    } else if (e.action == "bucket_filter") {
      s.run_bucket_filter(store, e.params, e.timestamp);
    } else if (e.action == "prequery") {
      s.run_prequery(store, e.params, e.timestamp);
    } else if (e.action == "refine") {
      s.run_refine(store, e.params, e.timestamp);
    } else if (e.action == "promote") {
      s.run_promote(store, e.params, e.timestamp);
    } else {
      fail(ErrorCode::InvalidParams, "unknown history action " + e.action);
    }
  }
  return s;
}

json Session::to_json() const {
  json history = json::array();
  for (const auto& e : history_) {
    history.push_back(json{{"action", e.action},
                           {"params", e.params},
                           {"ir", exploration::to_json(e.ir)},
                           {"cypher", render_cypher(e.ir)},
                           {"timestamp", e.timestamp}});
  }
  json out{{"session_id", id_},
           {"created", created_},
           {"canvases",
            {{"past", ids_json(canvases_.past)},
             {"present", ids_json(canvases_.present)},
             {"future", ids_json(canvases_.future)}}},
           {"staging", ids_json(staging_)},
           {"history", history},
           {"view", view_ ? exploration::to_json(*view_) : json(nullptr)},
           {"last_histogram", nullptr}};
  if (last_histogram_) {
    out["last_histogram"] = {{"population", exploration::to_json(last_histogram_->population)},
                             {"attribute", last_histogram_->attribute}};
  }
  return out;
}

Session Session::from_json(const json& j) {
  try {
    Session s(j.at("session_id").get<std::string>());
    s.created_ = j.at("created").get<std::string>();
    const auto& c = j.at("canvases");
    for (const auto& id : ids_from(c.at("past"), "past")) s.canvases_.past.insert(id);
    for (const auto& id : ids_from(c.at("present"), "present")) s.canvases_.present.insert(id);
    for (const auto& id : ids_from(c.at("future"), "future")) s.canvases_.future.insert(id);
    s.staging_ = ids_from(j.at("staging"), "staging");
    for (const auto& e : j.at("history")) {
      s.history_.push_back(HistoryEntry{e.at("action").get<std::string>(), e.at("params"), query_from_json(e.at("ir")),
                                        e.at("timestamp").get<std::string>()});
    }
    if (j.contains("view") && !j["view"].is_null()) s.view_ = view_from_json(j["view"]);
    if (j.contains("last_histogram") && !j["last_histogram"].is_null()) {
      s.last_histogram_ = HistogramState{query_from_json(j["last_histogram"].at("population")),
                                         j["last_histogram"].at("attribute").get<std::string>()};
    }
    return s;
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidParams, std::string("malformed session: ") + e.what());
  }
}

json to_json(const RefinerView& view) {
  json out{{"label", view.label},
           {"population", ids_json(view.population)},
           {"mode", to_string(view.mode)},
           {"total", view.total}};
  if (view.mode == ViewMode::histogram) {
    out["attribute"] = view.attribute;
    out["buckets"] = json::array();
    for (const auto& b : view.buckets) out["buckets"].push_back(to_json(b));
  } else {
    out["columns"] = view.columns;
    out["rows"] = json::array();
    for (const auto& r : view.rows) out["rows"].push_back(json{{"id", r.id.hex()}, {"values", graph::to_json(r.values)}});
  }
  return out;
}

RefinerView view_from_json(const json& j) {
  RefinerView v;
  v.label = j.at("label").get<std::string>();
  v.population = ids_from(j.at("population"), "population");
  v.mode = j.at("mode").get<std::string>() == "table" ? ViewMode::table : ViewMode::histogram;
  v.total = j.at("total").get<std::size_t>();
  if (v.mode == ViewMode::histogram) {
    v.attribute = j.at("attribute").get<std::string>();
    for (const auto& b : j.at("buckets")) v.buckets.push_back(bucket_from_json(b));
  } else {
    v.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
      v.rows.push_back(TableRow{NodeId::from_hex(r.at("id").get<std::string>()), graph::properties_from_json(r.at("values"))});
    }
  }
  return v;
}

json to_json(const RefineSpec& spec) {
  if (const auto* h = std::get_if<HistogramSelect>(&spec)) {
    json keys = json::array();
    for (const auto& k : h->keys) keys.push_back(to_json(k));
    json out{{"mode", "histogram"}, {"buckets", keys}};
    if (!h->attribute.empty()) out["attribute"] = h->attribute;
    return out;
  }
  const auto& t = std::get<TableSelect>(spec);
  return json{{"mode", "table"}, {"attribute", t.attribute}, {"direction", to_string(t.direction)}, {"top_k", t.top_k}};
}

RefineSpec refine_spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("mode") || !j["mode"].is_string()) {
    fail(ErrorCode::InvalidParams, "refine needs a mode (histogram or table)");
  }
  const auto mode = j["mode"].get<std::string>();
  if (mode == "histogram") {
    HistogramSelect h;
    if (j.contains("attribute")) {
      if (!j["attribute"].is_string()) fail(ErrorCode::InvalidParams, "attribute must be text");
      h.attribute = j["attribute"].get<std::string>();
    }
    if (!j.contains("buckets") || !j["buckets"].is_array()) fail(ErrorCode::InvalidParams, "histogram refine needs buckets");
    for (const auto& b : j["buckets"]) {
      try {
        // Accept either a bare bucket key or a bucket as returned by a histogram.
        h.keys.push_back(bucket_key_from_json(b.is_object() && b.contains("key") ? b["key"] : b));
      } catch (const Error& e) {
        fail(ErrorCode::InvalidParams, e.what());
      }
    }
    return h;
  }
  if (mode == "table") {
    TableSelect t;
    if (!j.contains("attribute") || !j["attribute"].is_string()) fail(ErrorCode::InvalidParams, "table refine needs an attribute");
    t.attribute = j["attribute"].get<std::string>();
    const auto dir = j.value("direction", "desc");
    if (dir != "asc" && dir != "desc") fail(ErrorCode::InvalidParams, "direction must be asc or desc");
    t.direction = dir == "asc" ? SortDirection::asc : SortDirection::desc;
    if (!j.contains("top_k") || !j["top_k"].is_number_integer() || j["top_k"].get<long long>() < 1) {
      fail(ErrorCode::InvalidParams, "top_k must be an integer >= 1");
    }
    t.top_k = j["top_k"].get<std::size_t>();
    return t;
  }
  fail(ErrorCode::InvalidParams, "unknown refine mode " + mode);
}

}  // namespace graphy::exploration
