#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "graphy/graph/schema.hpp"

namespace graphy::graph {

using NodePredicate = std::function<bool(const Node&)>;

/// Embedded property graph of Fact and Dimension nodes.
///
/// Mutations are serialized through one writer lock; readers share. When
/// opened on a directory, every mutation is appended to `ops.log` before it is
/// acknowledged, and `close()` (or destruction) folds the log into
/// `snapshot.jsonl`.
class GraphStore {
 public:
  GraphStore();
  explicit GraphStore(std::filesystem::path dir);
  ~GraphStore();

  GraphStore(const GraphStore&) = delete;
  GraphStore& operator=(const GraphStore&) = delete;

  void declare_label(const std::string& label, const LabelSchema& schema);
  GraphSchema schema() const;

  /// Inserts or merges a fact; new property values win per key.
  NodeId upsert_fact(const Node& node);
  NodeId upsert_fact(const NodeId& id, const std::string& label, const Properties& properties);

  /// One dimension node plus HAS_DIMENSION edge per item, ids in input order.
  std::vector<NodeId> add_dimensions(const NodeId& owner, const std::string& label,
                                     const std::vector<Properties>& items);

  Edge link_facts(const NodeId& source, const NodeId& target);

  std::optional<Node> find(const NodeId& id) const;
  Node get(const NodeId& id) const;  // throws UnknownNode
  bool contains(const NodeId& id) const;
  bool has_edge(const NodeId& source, const NodeId& target, EdgeKind kind) const;

  /// Sorted by id, duplicates removed.
  std::vector<NodeId> neighbors(const NodeId& id, EdgeKind kind, Direction direction) const;

  /// Every node of `label` accepted by `predicate` (all when empty), by id.
  std::vector<Node> scan(std::string_view label, const NodePredicate& predicate = {}) const;

  /// Calls `fn` for every node of `label` by id, under the read lock. `fn`
  /// must not call back into the store.
  void for_each(std::string_view label, const std::function<void(const Node&)>& fn) const;

  /// Calls `fn` for each of `ids` that exists, in the given order, under the
  /// read lock.
  void for_each_of(const std::vector<NodeId>& ids, const std::function<void(const Node&)>& fn) const;

  /// Dimensions of `owner` in extraction order; all labels when `label` empty.
  std::vector<Node> dimensions_of(const NodeId& owner, std::string_view label = {}) const;

  std::vector<Node> nodes() const;
  std::vector<Edge> edges() const;
  std::size_t node_count() const;
  std::size_t edge_count() const;

  /// One `{"kind":"node"|"edge",...}` record per line, nodes by id then edges.
  void write_jsonl(std::ostream& out) const;

  /// Loads records produced by write_jsonl. Unknown labels get a schema
  /// inferred from the JSON value types. Optional `{"kind":"schema"}` records
  /// declare labels explicitly.
  void read_jsonl(std::istream& in);

  /// Writes the snapshot and truncates the log (no-op when in-memory).
  void compact();
  void close();

  static NodeId dimension_id(const NodeId& owner, std::string_view label, std::size_t index,
                             const Properties& properties);

 private:
  struct State;

  void apply_op(const nlohmann::json& op, bool log);
  void log_op(const nlohmann::json& op);
  void load_from_disk();

  NodeId upsert_fact_locked(const NodeId& id, const std::string& label,
                            const Properties& properties);
  std::vector<NodeId> add_dimensions_locked(const NodeId& owner, const std::string& label,
                                            const std::vector<Properties>& items);
  Edge link_facts_locked(const NodeId& source, const NodeId& target);
  void write_records_locked(std::ostream& out) const;
  void read_jsonl_locked(std::istream& in);

  mutable std::shared_mutex mutex_;
  std::unique_ptr<State> state_;
  std::optional<std::filesystem::path> dir_;
  std::ofstream log_;
  bool closed_ = false;
};

}  // namespace graphy::graph
