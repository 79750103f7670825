#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphy/graph/node_id.hpp"
#include "graphy/graph/property.hpp"
#include "graphy/graph/schema.hpp"

namespace graphy::exploration {

using graph::NodeId;
using graph::PropertyValue;

/// Equal-width binning of a real attribute over [lo, hi]; values >= hi fall
/// in the last bin.
struct Bins {
  double lo = 0;
  double hi = 0;
  std::size_t count = 10;

  double width() const noexcept { return (hi - lo) / static_cast<double>(count); }
  /// Bin index of `x` (may be negative or >= count for values outside [lo, hi)).
  long long index_of(double x) const noexcept;

  friend bool operator==(const Bins&, const Bins&) = default;
};

/// Identifies one histogram bucket: missing value ("∅"), an exact value, or
/// one bin of a real attribute.
struct BucketKey {
  enum class Kind { missing, value, bin };
  Kind kind = Kind::missing;
  PropertyValue value;  // Kind::value
  Bins bins;            // Kind::bin
  std::size_t bin = 0;  // Kind::bin

  static BucketKey missing_value() { return {}; }
  static BucketKey of(PropertyValue v);
  static BucketKey of_bin(Bins bins, std::size_t index);

  /// Whether a node whose attribute is `v` (nullptr when absent) falls here.
  bool contains(const PropertyValue* v) const;
  /// "2023", "∅", or "[0.5, 0.75)".
  std::string label() const;

  friend bool operator==(const BucketKey&, const BucketKey&) = default;
};

struct Predicate {
  enum class Op { eq, contains, has, in_bucket };
  Op op = Op::has;
  std::string attribute;
  PropertyValue value;             // eq, contains (text)
  std::vector<BucketKey> buckets;  // in_bucket: any of

  static Predicate eq(std::string attribute, PropertyValue value);
  static Predicate contains(std::string attribute, std::string needle);
  static Predicate has(std::string attribute);
  static Predicate in_bucket(std::string attribute, std::vector<BucketKey> keys);

  bool matches(const graph::Node& node) const;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct EdgePattern {
  graph::EdgeKind kind = graph::EdgeKind::navigates_to;
  graph::Direction direction = graph::Direction::out;

  friend bool operator==(const EdgePattern&, const EdgePattern&) = default;
};

/// `(a)-[edge]->(n:label)` when `edge` is set (anchors constrain `a`),
/// otherwise `(n:label)` (anchors constrain `n`). `exclude` removes ids from n.
struct MatchClause {
  std::string label;
  std::optional<EdgePattern> edge;
  std::optional<std::vector<NodeId>> anchors;
  std::vector<NodeId> exclude;

  friend bool operator==(const MatchClause&, const MatchClause&) = default;
};

struct Aggregate {
  std::string group_by;
  std::optional<Bins> bins;  // real attributes

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

enum class SortDirection { asc, desc };

struct Sort {
  std::string attribute;
  SortDirection direction = SortDirection::asc;

  friend bool operator==(const Sort&, const Sort&) = default;
};

struct QueryIR {
  MatchClause match;
  std::vector<Predicate> filters;  // conjunctive
  std::optional<Aggregate> aggregate;
  std::optional<Sort> sort;
  std::optional<std::size_t> limit;

  /// Throws InvalidIR on structural errors.
  void validate() const;
  /// Also checks label and attributes against a schema (UnknownLabel, UnknownAttribute).
  void validate(const graph::GraphSchema& schema) const;

  /// The node population of `ids` restricted to `label`.
  static QueryIR of_ids(std::string label, std::vector<NodeId> ids);

  friend bool operator==(const QueryIR&, const QueryIR&) = default;
};

std::string_view to_string(SortDirection d) noexcept;

nlohmann::json to_json(const Bins& bins);
nlohmann::json to_json(const BucketKey& key);
nlohmann::json to_json(const Predicate& p);
nlohmann::json to_json(const QueryIR& ir);
Bins bins_from_json(const nlohmann::json& j);
BucketKey bucket_key_from_json(const nlohmann::json& j);
Predicate predicate_from_json(const nlohmann::json& j);
QueryIR query_from_json(const nlohmann::json& j);  // throws InvalidIR

/// Deterministic Cypher text for a valid IR. Throws InvalidIR.
std::string render_cypher(const QueryIR& ir);

/// Cypher literal for a property value (strings single-quoted and escaped).
std::string cypher_literal(const PropertyValue& v);

/// Ordering used for histogram keys and sorts: numbers numerically, then text, lists, booleans.
int compare_values(const PropertyValue& a, const PropertyValue& b);

}  // namespace graphy::exploration
