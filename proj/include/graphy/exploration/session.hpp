#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "graphy/exploration/histogram.hpp"

namespace graphy::exploration {

inline constexpr std::size_t kDefaultPageSize = 50;

struct Canvases {
  std::set<NodeId> past;
  std::set<NodeId> present;
  std::set<NodeId> future;

  friend bool operator==(const Canvases&, const Canvases&) = default;
};

struct HistoryEntry {
  std::string action;  // search, histogram, bucket_filter, prequery, refine, promote
  nlohmann::json params;
  QueryIR ir;
  std::string timestamp;
};

struct SearchPage {
  std::vector<graph::Node> nodes;
  std::size_t total = 0;
};

enum class ViewMode { histogram, table };

struct TableRow {
  NodeId id;
  graph::Properties values;  // requested columns that are present
};

/// The pre-queried neighbors of a selection, shown as counts or a table
/// without placing any of them on a canvas.
struct RefinerView {
  std::string label;
  std::vector<NodeId> population;  // by id
  ViewMode mode = ViewMode::histogram;
  std::string attribute;             // histogram mode
  std::vector<std::string> columns;  // table mode
  std::vector<HistogramBucket> buckets;
  std::vector<TableRow> rows;
  std::size_t total = 0;
};

struct HistogramSelect {
  std::string attribute;  // empty = the view's attribute
  std::vector<BucketKey> keys;
};

struct TableSelect {
  std::string attribute;
  SortDirection direction = SortDirection::desc;
  std::size_t top_k = 10;
};

using RefineSpec = std::variant<HistogramSelect, TableSelect>;

/// One user's exploration state. Every action appends one history entry with
/// its parameters and QueryIR; failed actions leave the session unchanged.
/// Not thread-safe: callers serialize actions per session.
class Session {
 public:
  explicit Session(std::string id = {});

  const std::string& id() const noexcept { return id_; }
  const std::string& created() const noexcept { return created_; }
  const Canvases& canvases() const noexcept { return canvases_; }
  const std::vector<NodeId>& staging() const noexcept { return staging_; }
  const std::vector<HistoryEntry>& history() const noexcept { return history_; }
  const std::optional<RefinerView>& view() const noexcept { return view_; }

  /// Matching nodes by id, first `limit`; the page replaces the staging list.
  SearchPage search(const graph::GraphStore& store, const std::string& label, std::vector<Predicate> predicates,
                    std::size_t limit = kDefaultPageSize);

  Histogram histogram(const graph::GraphStore& store, const QueryIR& population, const std::string& attribute);

  /// Filters the population of the last histogram; results replace staging.
  std::vector<NodeId> bucket_filter(const graph::GraphStore& store, const std::string& attribute,
                                    const HistogramBucket& bucket);

  /// Neighbors of `selected` (⊆ present) not on past/present. Clears future.
  RefinerView prequery(const graph::GraphStore& store, const std::vector<NodeId>& selected,
                       ViewMode mode = ViewMode::histogram, const std::string& attribute = {},
                       const std::vector<std::string>& columns = {});

  /// Selection from the current view; becomes the future canvas.
  std::vector<NodeId> refine(const graph::GraphStore& store, const RefineSpec& spec);

  /// present -> past, chosen -> present, future cleared. chosen ⊆ future ∪ staging.
  void promote(const graph::GraphStore& store, const std::vector<NodeId>& chosen);

  nlohmann::json to_json() const;
  static Session from_json(const nlohmann::json& j);

  /// A fresh session re-executing `original`'s history against `store`.
  static Session replay(const graph::GraphStore& store, const Session& original);

  /// "year" when the label has it, else the label's first attribute.
  static std::string default_attribute(const graph::GraphSchema& schema, const std::string& label);

 private:
  SearchPage run_search(const graph::GraphStore& store, const nlohmann::json& params, const std::string& ts);
  Histogram run_histogram(const graph::GraphStore& store, const nlohmann::json& params, const std::string& ts);
  std::vector<NodeId> run_bucket_filter(const graph::GraphStore& store, const nlohmann::json& params,
                                        const std::string& ts);
  RefinerView run_prequery(const graph::GraphStore& store, const nlohmann::json& params, const std::string& ts);
  std::vector<NodeId> run_refine(const graph::GraphStore& store, const nlohmann::json& params, const std::string& ts);
  void run_promote(const graph::GraphStore& store, const nlohmann::json& params, const std::string& ts);

  void log(std::string action, nlohmann::json params, QueryIR ir, const std::string& ts);

  struct HistogramState {
    QueryIR population;
    std::string attribute;
  };

  std::string id_;
  std::string created_;
  Canvases canvases_;
  std::vector<NodeId> staging_;
  std::vector<HistoryEntry> history_;
  std::optional<RefinerView> view_;
  std::optional<HistogramState> last_histogram_;
};

std::string_view to_string(ViewMode mode) noexcept;
nlohmann::json to_json(const RefinerView& view);
RefinerView view_from_json(const nlohmann::json& j);
RefineSpec refine_spec_from_json(const nlohmann::json& j);  // throws InvalidParams
nlohmann::json to_json(const RefineSpec& spec);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace graphy::exploration
