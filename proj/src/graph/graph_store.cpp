#include "graphy/graph/graph_store.hpp"

#include <algorithm>
#include <array>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <tuple>

#include "graphy/error.hpp"

namespace graphy::graph {

namespace {

using EdgeKey = std::tuple<EdgeKind, NodeId, NodeId>;

std::size_t kind_index(EdgeKind kind) { return kind == EdgeKind::has_dimension ? 0 : 1; }

std::int64_t ordinal_of(const Edge& edge) {
  auto it = edge.properties.find("ordinal");
  if (it == edge.properties.end()) return 0;
  if (const auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
  return 0;
}

nlohmann::json node_record(const Node& node) {
  nlohmann::json rec = {{"kind", "node"},
                        {"id", node.id.hex()},
                        {"label", node.label},
                        {"node_kind", to_string(node.kind)},
                        {"properties", to_json(node.properties)}};
  if (node.owner) rec["owner"] = node.owner->hex();
  return rec;
}

nlohmann::json edge_record(const Edge& edge) {
  return {{"kind", "edge"},
          {"type", to_string(edge.kind)},
          {"source", edge.source.hex()},
          {"target", edge.target.hex()},
          {"properties", to_json(edge.properties)}};
}

ValueType infer_type(const PropertyValue& value) { return type_of(value); }

}  // namespace

struct GraphStore::State {
  GraphSchema schema;
  std::map<NodeId, Node> nodes;
  std::map<EdgeKey, Edge> edges;
  std::map<NodeId, std::array<std::set<NodeId>, 2>> out;
  std::map<NodeId, std::array<std::set<NodeId>, 2>> in;

  void insert_edge(Edge edge) {
    EdgeKey key{edge.kind, edge.source, edge.target};
    out[edge.source][kind_index(edge.kind)].insert(edge.target);
    in[edge.target][kind_index(edge.kind)].insert(edge.source);
    edges.insert_or_assign(std::move(key), std::move(edge));
  }
};

GraphStore::GraphStore() : state_(std::make_unique<State>()) {}

GraphStore::GraphStore(std::filesystem::path dir)
    : state_(std::make_unique<State>()), dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(*dir_, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot create graph directory " + dir_->string());
  load_from_disk();
  log_.open(*dir_ / "ops.log", std::ios::app);
  if (!log_) fail(ErrorCode::IoFailure, "cannot open " + (*dir_ / "ops.log").string());
}

GraphStore::~GraphStore() {
  try {
    close();
  } catch (const std::exception& e) {
    std::cerr << "graph store: compaction on shutdown failed: " << e.what() << '\n';
  }
}

void GraphStore::load_from_disk() {
  const auto snapshot = *dir_ / "snapshot.jsonl";
  if (std::filesystem::exists(snapshot)) {
    std::ifstream in(snapshot);
    if (!in) fail(ErrorCode::IoFailure, "cannot read " + snapshot.string());
    read_jsonl(in);
  }
  const auto log_path = *dir_ / "ops.log";
  if (!std::filesystem::exists(log_path)) return;
  std::ifstream in(log_path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json op = nlohmann::json::parse(line, nullptr, false);
    // A torn final write leaves one unparsable line; everything before it
    // was acknowledged and is replayed.
    if (op.is_discarded()) break;
    apply_op(op, false);
  }
}

void GraphStore::log_op(const nlohmann::json& op) {
  if (!dir_) return;
  log_ << op.dump() << '\n';
  log_.flush();
  if (!log_) fail(ErrorCode::IoFailure, "cannot append to graph log");
}

void GraphStore::apply_op(const nlohmann::json& op, bool log) {
  const std::string name = op.at("op").get<std::string>();
  if (name == "declare") {
    std::unique_lock lock(mutex_);
    state_->schema.declare(op.at("label").get<std::string>(),
                           LabelSchema::from_json(op.at("schema")));
  } else if (name == "upsert_fact") {
    std::unique_lock lock(mutex_);
    upsert_fact_locked(NodeId::from_hex(op.at("id").get<std::string>()),
                       op.at("label").get<std::string>(),
                       properties_from_json(op.at("properties")));
  } else if (name == "add_dimensions") {
    std::vector<Properties> items;
    for (const auto& item : op.at("items")) items.push_back(properties_from_json(item));
    std::unique_lock lock(mutex_);
    add_dimensions_locked(NodeId::from_hex(op.at("owner").get<std::string>()),
                          op.at("label").get<std::string>(), items);
  } else if (name == "link") {
    std::unique_lock lock(mutex_);
    link_facts_locked(NodeId::from_hex(op.at("source").get<std::string>()),
                      NodeId::from_hex(op.at("target").get<std::string>()));
  } else {
    fail(ErrorCode::IoFailure, "unknown graph log op '" + name + "'");
  }
  if (log) log_op(op);
}

void GraphStore::declare_label(const std::string& label, const LabelSchema& schema) {
  std::unique_lock lock(mutex_);
  state_->schema.declare(label, schema);
  log_op({{"op", "declare"}, {"label", label}, {"schema", schema.to_json()}});
}

GraphSchema GraphStore::schema() const {
  std::shared_lock lock(mutex_);
  return state_->schema;
}

NodeId GraphStore::upsert_fact(const Node& node) {
  if (node.kind != NodeKind::fact) {
    fail(ErrorCode::KindViolation, "upsert_fact called with a dimension node");
  }
  return upsert_fact(node.id, node.label, node.properties);
}

NodeId GraphStore::upsert_fact(const NodeId& id, const std::string& label,
                               const Properties& properties) {
  std::unique_lock lock(mutex_);
  NodeId result = upsert_fact_locked(id, label, properties);
  log_op({{"op", "upsert_fact"},
          {"id", id.hex()},
          {"label", label},
          {"properties", to_json(properties)}});
  return result;
}

NodeId GraphStore::upsert_fact_locked(const NodeId& id, const std::string& label,
                                      const Properties& properties) {
  if (id.empty()) fail(ErrorCode::SchemaViolation, "fact id must be set");
  if (label.empty()) fail(ErrorCode::SchemaViolation, "fact label must be non-empty");
  auto it = state_->nodes.find(id);
  Properties merged = properties;
  if (it != state_->nodes.end()) {
    if (it->second.kind != NodeKind::fact) {
      fail(ErrorCode::KindViolation, "node " + id.hex() + " is a dimension");
    }
    if (it->second.label != label) {
      fail(ErrorCode::SchemaViolation,
           "node " + id.hex() + " has label '" + it->second.label + "', not '" + label + "'");
    }
    merged = it->second.properties;
    for (const auto& [key, value] : properties) merged.insert_or_assign(key, value);
  }
  state_->schema.validate(label, NodeKind::fact, merged);
  if (it != state_->nodes.end()) {
    it->second.properties = std::move(merged);
  } else {
    state_->nodes.emplace(id, Node{id, label, NodeKind::fact, std::nullopt, std::move(merged)});
  }
  return id;
}

NodeId GraphStore::dimension_id(const NodeId& owner, std::string_view label, std::size_t index,
                                const Properties& properties) {
  std::string content = "dimension\x1f" + owner.hex() + "\x1f" + std::string(label) + "\x1f" +
                        std::to_string(index) + "\x1f" + to_json(properties).dump();
  return NodeId::hash_of(content);
}

std::vector<NodeId> GraphStore::add_dimensions(const NodeId& owner, const std::string& label,
                                               const std::vector<Properties>& items) {
  std::unique_lock lock(mutex_);
  auto ids = add_dimensions_locked(owner, label, items);
  if (!items.empty()) {
    nlohmann::json encoded = nlohmann::json::array();
    for (const auto& item : items) encoded.push_back(to_json(item));
    log_op({{"op", "add_dimensions"}, {"owner", owner.hex()}, {"label", label}, {"items", encoded}});
  }
  return ids;
}

std::vector<NodeId> GraphStore::add_dimensions_locked(const NodeId& owner,
                                                      const std::string& label,
                                                      const std::vector<Properties>& items) {
  auto it = state_->nodes.find(owner);
  if (it == state_->nodes.end() || it->second.kind != NodeKind::fact) {
    fail(ErrorCode::UnknownOwner, "no fact node " + owner.hex());
  }
  if (items.empty()) return {};
  for (const auto& item : items) state_->schema.validate(label, NodeKind::dimension, item);

  std::vector<NodeId> ids;
  ids.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    NodeId id = dimension_id(owner, label, i, items[i]);
    state_->nodes.insert_or_assign(id, Node{id, label, NodeKind::dimension, owner, items[i]});
    state_->insert_edge(Edge{owner, id, EdgeKind::has_dimension,
                             Properties{{"ordinal", static_cast<std::int64_t>(i)}}});
    ids.push_back(id);
  }
  return ids;
}

Edge GraphStore::link_facts(const NodeId& source, const NodeId& target) {
  std::unique_lock lock(mutex_);
  Edge edge = link_facts_locked(source, target);
  log_op({{"op", "link"}, {"source", source.hex()}, {"target", target.hex()}});
  return edge;
}

Edge GraphStore::link_facts_locked(const NodeId& source, const NodeId& target) {
  for (const NodeId* id : {&source, &target}) {
    auto it = state_->nodes.find(*id);
    if (it == state_->nodes.end()) fail(ErrorCode::UnknownNode, "no node " + id->hex());
    if (it->second.kind != NodeKind::fact) {
      fail(ErrorCode::KindViolation, "node " + id->hex() + " is a dimension");
    }
  }
  EdgeKey key{EdgeKind::navigates_to, source, target};
  if (auto it = state_->edges.find(key); it != state_->edges.end()) return it->second;
  Edge edge{source, target, EdgeKind::navigates_to, {}};
  state_->insert_edge(edge);
  return edge;
}

std::optional<Node> GraphStore::find(const NodeId& id) const {
  std::shared_lock lock(mutex_);
  auto it = state_->nodes.find(id);
  if (it == state_->nodes.end()) return std::nullopt;
  return it->second;
}

Node GraphStore::get(const NodeId& id) const {
  auto node = find(id);
  if (!node) fail(ErrorCode::UnknownNode, "no node " + id.hex());
  return std::move(*node);
}

bool GraphStore::contains(const NodeId& id) const {
  std::shared_lock lock(mutex_);
  return state_->nodes.contains(id);
}

bool GraphStore::has_edge(const NodeId& source, const NodeId& target, EdgeKind kind) const {
  std::shared_lock lock(mutex_);
  return state_->edges.contains(EdgeKey{kind, source, target});
}

std::vector<NodeId> GraphStore::neighbors(const NodeId& id, EdgeKind kind,
                                          Direction direction) const {
  std::shared_lock lock(mutex_);
  if (!state_->nodes.contains(id)) fail(ErrorCode::UnknownNode, "no node " + id.hex());
  std::set<NodeId> result;
  const std::size_t k = kind_index(kind);
  if (direction != Direction::in) {
    if (auto it = state_->out.find(id); it != state_->out.end()) {
      result.insert(it->second[k].begin(), it->second[k].end());
    }
  }
  if (direction != Direction::out) {
    if (auto it = state_->in.find(id); it != state_->in.end()) {
      result.insert(it->second[k].begin(), it->second[k].end());
    }
  }
  return {result.begin(), result.end()};
}

std::vector<Node> GraphStore::scan(std::string_view label, const NodePredicate& predicate) const {
  std::shared_lock lock(mutex_);
  if (!state_->schema.has_label(label)) {
    fail(ErrorCode::UnknownLabel, "unknown label '" + std::string(label) + "'");
  }
  std::vector<Node> out;
  for (const auto& [id, node] : state_->nodes) {
    if (node.label != label) continue;
    if (predicate && !predicate(node)) continue;
    out.push_back(node);
  }
  return out;
}

void GraphStore::for_each(std::string_view label, const std::function<void(const Node&)>& fn) const {
  std::shared_lock lock(mutex_);
  if (!state_->schema.has_label(label)) {
    fail(ErrorCode::UnknownLabel, "unknown label '" + std::string(label) + "'");
  }
  for (const auto& [id, node] : state_->nodes) {
    if (node.label == label) fn(node);
  }
}

void GraphStore::for_each_of(const std::vector<NodeId>& ids, const std::function<void(const Node&)>& fn) const {
  std::shared_lock lock(mutex_);
  for (const auto& id : ids) {
    if (auto it = state_->nodes.find(id); it != state_->nodes.end()) fn(it->second);
  }
}

std::vector<Node> GraphStore::dimensions_of(const NodeId& owner, std::string_view label) const {
  std::shared_lock lock(mutex_);
  if (!state_->nodes.contains(owner)) fail(ErrorCode::UnknownNode, "no node " + owner.hex());
  std::vector<std::pair<std::int64_t, const Node*>> found;
  auto it = state_->out.find(owner);
  if (it == state_->out.end()) return {};
  for (const NodeId& target : it->second[kind_index(EdgeKind::has_dimension)]) {
    const Node& node = state_->nodes.at(target);
    if (!label.empty() && node.label != label) continue;
    const Edge& edge = state_->edges.at(EdgeKey{EdgeKind::has_dimension, owner, target});
    found.emplace_back(ordinal_of(edge), &node);
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first, a.second->id) < std::tie(b.first, b.second->id);
  });
  std::vector<Node> out;
  out.reserve(found.size());
  for (const auto& [_, node] : found) out.push_back(*node);
  return out;
}

std::vector<Node> GraphStore::nodes() const {
  std::shared_lock lock(mutex_);
  std::vector<Node> out;
  out.reserve(state_->nodes.size());
  for (const auto& [_, node] : state_->nodes) out.push_back(node);
  return out;
}

std::vector<Edge> GraphStore::edges() const {
  std::shared_lock lock(mutex_);
  std::vector<Edge> out;
  out.reserve(state_->edges.size());
  for (const auto& [_, edge] : state_->edges) out.push_back(edge);
  return out;
}

std::size_t GraphStore::node_count() const {
  std::shared_lock lock(mutex_);
  return state_->nodes.size();
}

std::size_t GraphStore::edge_count() const {
  std::shared_lock lock(mutex_);
  return state_->edges.size();
}

void GraphStore::write_records_locked(std::ostream& out) const {
  for (const auto& [_, node] : state_->nodes) out << node_record(node).dump() << '\n';
  for (const auto& [_, edge] : state_->edges) out << edge_record(edge).dump() << '\n';
}

void GraphStore::write_jsonl(std::ostream& out) const {
  std::shared_lock lock(mutex_);
  write_records_locked(out);
  if (!out) fail(ErrorCode::IoFailure, "failed writing graph records");
}

void GraphStore::read_jsonl(std::istream& in) {
  {
    std::unique_lock lock(mutex_);
    read_jsonl_locked(in);
  }
  // Imports bypass the op log, so a persistent store snapshots right away.
  if (log_.is_open()) compact();
}

void GraphStore::read_jsonl_locked(std::istream& in) {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      fail(ErrorCode::IoFailure, "malformed graph record on line " + std::to_string(line_no));
    }
    const std::string kind = rec.value("kind", "");
    if (kind == "schema") {
      GraphSchema declared = GraphSchema::from_json(rec.at("schema"));
      for (const auto& label : declared.labels()) state_->schema.declare(label, declared.at(label));
    } else if (kind == "node") {
      Node node;
      node.id = NodeId::from_hex(rec.at("id").get<std::string>());
      node.label = rec.at("label").get<std::string>();
      auto nk = parse_node_kind(rec.value("node_kind", "fact"));
      if (!nk) fail(ErrorCode::SchemaViolation, "bad node_kind on line " + std::to_string(line_no));
      node.kind = *nk;
      if (rec.contains("owner")) node.owner = NodeId::from_hex(rec.at("owner").get<std::string>());
      node.properties = properties_from_json(rec.value("properties", nlohmann::json::object()));
      if (node.kind == NodeKind::dimension && !node.owner) {
        fail(ErrorCode::SchemaViolation, "dimension without owner on line " + std::to_string(line_no));
      }
      nodes.push_back(std::move(node));
    } else if (kind == "edge") {
      Edge edge;
      auto ek = parse_edge_kind(rec.at("type").get<std::string>());
      if (!ek) fail(ErrorCode::SchemaViolation, "bad edge type on line " + std::to_string(line_no));
      edge.kind = *ek;
      edge.source = NodeId::from_hex(rec.at("source").get<std::string>());
      edge.target = NodeId::from_hex(rec.at("target").get<std::string>());
      edge.properties = properties_from_json(rec.value("properties", nlohmann::json::object()));
      edges.push_back(std::move(edge));
    } else {
      fail(ErrorCode::IoFailure, "unknown record kind on line " + std::to_string(line_no));
    }
  }

  // Labels not declared up front get an all-optional schema from the values.
  std::map<std::string, LabelSchema> inferred;
  for (const Node& node : nodes) {
    if (state_->schema.has_label(node.label)) continue;
    auto [it, _] = inferred.try_emplace(node.label, LabelSchema(node.kind));
    if (it->second.kind() != node.kind) {
      fail(ErrorCode::SchemaViolation, "label '" + node.label + "' used for both node kinds");
    }
    for (const auto& [key, value] : node.properties) {
      const PropertySpec* spec = it->second.find(key);
      if (spec && spec->type != infer_type(value)) {
        fail(ErrorCode::SchemaViolation, "property '" + node.label + "." + key +
                                             "' has inconsistent value types");
      }
      if (!spec) it->second.add(key, infer_type(value), false);
    }
  }
  for (const auto& [label, schema] : inferred) state_->schema.declare(label, schema);

  for (Node& node : nodes) {
    state_->schema.validate(node.label, node.kind, node.properties);
    state_->nodes.insert_or_assign(node.id, std::move(node));
  }
  for (Edge& edge : edges) {
    auto src = state_->nodes.find(edge.source);
    auto dst = state_->nodes.find(edge.target);
    if (src == state_->nodes.end() || dst == state_->nodes.end()) {
      fail(ErrorCode::UnknownNode, "edge references a missing node");
    }
    const bool ok = edge.kind == EdgeKind::navigates_to
                        ? src->second.kind == NodeKind::fact && dst->second.kind == NodeKind::fact
                        : src->second.kind == NodeKind::fact &&
                              dst->second.kind == NodeKind::dimension &&
                              dst->second.owner == edge.source;
    if (!ok) fail(ErrorCode::KindViolation, "edge endpoints violate the edge kind");
    state_->insert_edge(std::move(edge));
  }
  for (const auto& [id, node] : state_->nodes) {
    if (node.kind != NodeKind::dimension) continue;
    if (!state_->edges.contains(EdgeKey{EdgeKind::has_dimension, *node.owner, id})) {
      fail(ErrorCode::SchemaViolation, "dimension " + id.hex() + " lacks its HAS_DIMENSION edge");
    }
  }
}

void GraphStore::compact() {
  if (!dir_ || closed_) return;
  std::unique_lock lock(mutex_);
  const auto snapshot = *dir_ / "snapshot.jsonl";
  const auto tmp = *dir_ / "snapshot.jsonl.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out << nlohmann::json{{"kind", "schema"}, {"schema", state_->schema.to_json()}}.dump() << '\n';
    write_records_locked(out);
    out.flush();
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, snapshot);
  log_.close();
  log_.open(*dir_ / "ops.log", std::ios::trunc);
  if (!log_) fail(ErrorCode::IoFailure, "cannot reset graph log");
}

void GraphStore::close() {
  if (closed_) return;
  compact();
  closed_ = true;
  if (log_.is_open()) log_.close();
}

}  // namespace graphy::graph
