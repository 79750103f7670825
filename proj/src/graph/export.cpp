#include "graphy/graph/export.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "graphy/error.hpp"

namespace graphy::graph {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
  return out;
}

std::string csv_value(const PropertyValue& value) {
  if (const auto* list = std::get_if<TextList>(&value)) {
    std::string joined;
    for (std::size_t i = 0; i < list->size(); ++i) {
      if (i) joined += ';';
      joined += (*list)[i];
    }
    return csv_escape(joined);
  }
  if (const auto* text = std::get_if<std::string>(&value)) return csv_escape(*text);
  return csv_escape(to_json(value).dump());
}

// Columns: declared keys first, then any extra keys seen on nodes/edges.
std::vector<std::string> columns_for(const std::vector<std::string>& declared,
                                     const std::set<std::string>& seen) {
  std::vector<std::string> cols = declared;
  for (const auto& key : seen) {
    if (std::find(cols.begin(), cols.end(), key) == cols.end()) cols.push_back(key);
  }
  return cols;
}

}  // namespace

std::optional<ExportFormat> parse_export_format(std::string_view name) noexcept {
  if (name == "jsonl") return ExportFormat::jsonl;
  if (name == "csv-import" || name == "csv") return ExportFormat::csv_import;
  return std::nullopt;
}

std::string csv_escape(std::string_view field) {
  bool quote = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!quote) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::filesystem::path> export_graph(const GraphStore& store, ExportFormat format,
                                                const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot create " + dir.string());

  if (format == ExportFormat::jsonl) {
    const auto path = dir / "graph.jsonl";
    auto out = open_out(path);
    store.write_jsonl(out);
    return {path};
  }

  const GraphSchema schema = store.schema();
  const auto nodes = store.nodes();
  const auto edges = store.edges();
  std::vector<std::filesystem::path> written;

  std::map<std::string, std::vector<const Node*>> by_label;
  std::map<std::string, std::set<std::string>> seen_keys;
  for (const auto& label : schema.labels()) by_label[label];
  for (const Node& node : nodes) {
    by_label[node.label].push_back(&node);
    for (const auto& [key, _] : node.properties) seen_keys[node.label].insert(key);
  }
  for (const auto& [label, members] : by_label) {
    const LabelSchema* ls = schema.find(label);
    auto cols = columns_for(ls ? ls->keys() : std::vector<std::string>{}, seen_keys[label]);
    const auto path = dir / ("vertex_" + label + ".csv");
    auto out = open_out(path);
    out << "id";
    for (const auto& c : cols) out << ',' << csv_escape(c);
    out << '\n';
    for (const Node* node : members) {
      out << node->id.hex();
      for (const auto& c : cols) {
        out << ',';
        if (auto it = node->properties.find(c); it != node->properties.end()) {
          out << csv_value(it->second);
        }
      }
      out << '\n';
    }
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
    written.push_back(path);
  }

  for (EdgeKind kind : kAllEdgeKinds) {
    std::set<std::string> keys;
    for (const Edge& e : edges) {
      if (e.kind != kind) continue;
      for (const auto& [key, _] : e.properties) keys.insert(key);
    }
    auto cols = columns_for({}, keys);
    const auto path = dir / ("edge_" + std::string(to_string(kind)) + ".csv");
    auto out = open_out(path);
    out << "source,target";
    for (const auto& c : cols) out << ',' << csv_escape(c);
    out << '\n';
    for (const Edge& e : edges) {
      if (e.kind != kind) continue;
      out << e.source.hex() << ',' << e.target.hex();
      for (const auto& c : cols) {
        out << ',';
        if (auto it = e.properties.find(c); it != e.properties.end()) out << csv_value(it->second);
      }
      out << '\n';
    }
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

void import_jsonl(GraphStore& store, const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot read " + file.string());
  store.read_jsonl(in);
}

}  // namespace graphy::graph
