#include "graphy/exploration/query_ir.hpp"

#include <charconv>
#include <cmath>

#include "graphy/error.hpp"
#include "graphy/text.hpp"

namespace graphy::exploration {

using nlohmann::json;

namespace {

std::optional<double> as_number(const PropertyValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

int rank(const PropertyValue& v) {
  if (std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v)) return 0;
  if (std::holds_alternative<std::string>(v)) return 1;
  if (std::holds_alternative<graph::TextList>(v)) return 2;
  return 3;
}

const PropertyValue* attribute_of(const graph::Node& node, const std::string& attribute) {
  auto it = node.properties.find(attribute);
  return it == node.properties.end() ? nullptr : &it->second;
}

std::string format_real(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

std::string name(std::string_view s) {
  if (is_identifier(s)) return std::string(s);
  std::string out = "`";
  for (char c : s) {
    out += c;
    if (c == '`') out += '`';
  }
  return out + "`";
}

std::string prop(const std::string& attribute) { return "n." + name(attribute); }

std::string id_list(const std::vector<NodeId>& ids) {
  std::string out = "[";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += "'" + ids[i].hex() + "'";
  }
  return out + "]";
}

std::string bin_expression(const std::string& attribute, const Bins& b) {
  const std::string p = prop(attribute);
  return "CASE WHEN " + p + " >= " + format_real(b.hi) + " THEN " + std::to_string(b.count - 1) +
         " ELSE toInteger(floor((" + p + " - " + format_real(b.lo) + ") / " + format_real(b.width()) + ")) END";
}

std::string bucket_condition(const std::string& attribute, const BucketKey& key) {
  switch (key.kind) {
    case BucketKey::Kind::missing: return prop(attribute) + " IS NULL";
    case BucketKey::Kind::value: return prop(attribute) + " = " + cypher_literal(key.value);
    case BucketKey::Kind::bin: return bin_expression(attribute, key.bins) + " = " + std::to_string(key.bin);
  }
  return {};
}

std::string condition(const Predicate& p) {
  switch (p.op) {
    case Predicate::Op::has: return prop(p.attribute) + " IS NOT NULL";
    case Predicate::Op::eq: return prop(p.attribute) + " = " + cypher_literal(p.value);
    case Predicate::Op::contains:
      return "replace(toLower(" + prop(p.attribute) + "), ' ', '') CONTAINS " +
             cypher_literal(text::squash(std::get<std::string>(p.value)));
    case Predicate::Op::in_bucket: {
      if (p.buckets.size() == 1) return bucket_condition(p.attribute, p.buckets[0]);
      std::string out = "(";
      for (std::size_t i = 0; i < p.buckets.size(); ++i) {
        if (i) out += " OR ";
        out += bucket_condition(p.attribute, p.buckets[i]);
      }
      return out + ")";
    }
  }
  return {};
}

std::vector<NodeId> ids_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::InvalidIR, "id list must be an array");
  std::vector<NodeId> out;
  for (const auto& v : j) {
    if (!v.is_string() || !NodeId::is_valid_hex(v.get<std::string>())) fail(ErrorCode::InvalidIR, "malformed node id");
    out.push_back(NodeId::from_hex(v.get<std::string>()));
  }
  return out;
}

json ids_to_json(const std::vector<NodeId>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(id.hex());
  return out;
}

PropertyValue value_or_fail(const json& j) {
  auto v = graph::value_from_json(j);
  if (!v) fail(ErrorCode::InvalidIR, "unsupported value " + j.dump());
  return *v;
}

}  // namespace

long long Bins::index_of(double x) const noexcept {
  if (x >= hi) return static_cast<long long>(count) - 1;
  const double w = width();
  if (!(w > 0)) return -1;
  return static_cast<long long>(std::floor((x - lo) / w));
}

BucketKey BucketKey::of(PropertyValue v) {
  BucketKey k;
  k.kind = Kind::value;
  k.value = std::move(v);
  return k;
}

BucketKey BucketKey::of_bin(Bins bins, std::size_t index) {
  BucketKey k;
  k.kind = Kind::bin;
  k.bins = bins;
  k.bin = index;
  return k;
}

bool BucketKey::contains(const PropertyValue* v) const {
  switch (kind) {
    case Kind::missing: return v == nullptr;
    case Kind::value: return v != nullptr && compare_values(*v, value) == 0 && rank(*v) == rank(value);
    case Kind::bin: {
      if (!v) return false;
      auto x = as_number(*v);
      return x && bins.index_of(*x) == static_cast<long long>(bin);
    }
  }
  return false;
}

std::string BucketKey::label() const {
  switch (kind) {
    case Kind::missing: return "\xE2\x88\x85";
    case Kind::value: return graph::display(value);
    case Kind::bin: {
      const double from = bins.lo + bins.width() * static_cast<double>(bin);
      const bool last = bin + 1 == bins.count;
      const double to = last ? bins.hi : bins.lo + bins.width() * static_cast<double>(bin + 1);
      return "[" + format_real(from) + ", " + format_real(to) + (last ? "]" : ")");
    }
  }
  return {};
}

Predicate Predicate::eq(std::string attribute, PropertyValue value) {
  return Predicate{Op::eq, std::move(attribute), std::move(value), {}};
}

Predicate Predicate::contains(std::string attribute, std::string needle) {
  return Predicate{Op::contains, std::move(attribute), std::move(needle), {}};
}

Predicate Predicate::has(std::string attribute) { return Predicate{Op::has, std::move(attribute), {}, {}}; }

Predicate Predicate::in_bucket(std::string attribute, std::vector<BucketKey> keys) {
  return Predicate{Op::in_bucket, std::move(attribute), {}, std::move(keys)};
}

bool Predicate::matches(const graph::Node& node) const {
  const PropertyValue* v = attribute_of(node, attribute);
  switch (op) {
    case Op::has: return v != nullptr;
    case Op::eq: return v != nullptr && rank(*v) == rank(value) && compare_values(*v, value) == 0;
    case Op::contains: {
      const auto* s = v ? std::get_if<std::string>(v) : nullptr;
      return s && text::squash(*s).find(text::squash(std::get<std::string>(value))) != std::string::npos;
    }
    case Op::in_bucket:
      for (const auto& b : buckets) {
        if (b.contains(v)) return true;
      }
      return false;
  }
  return false;
}

int compare_values(const PropertyValue& a, const PropertyValue& b) {
  const int ra = rank(a), rb = rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (ra == 0) {
    const auto* ia = std::get_if<std::int64_t>(&a);
    const auto* ib = std::get_if<std::int64_t>(&b);
    if (ia && ib) return *ia < *ib ? -1 : (*ia > *ib ? 1 : 0);
    const double x = *as_number(a), y = *as_number(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (ra == 1) return std::get<std::string>(a).compare(std::get<std::string>(b)) < 0 ? -1 : (a == b ? 0 : 1);
  if (ra == 2) {
    const auto& x = std::get<graph::TextList>(a);
    const auto& y = std::get<graph::TextList>(b);
    return x < y ? -1 : (x == y ? 0 : 1);
  }
  const bool x = std::get<bool>(a), y = std::get<bool>(b);
  return x == y ? 0 : (x ? 1 : -1);
}

void QueryIR::validate() const {
  if (match.label.empty()) fail(ErrorCode::InvalidIR, "match label is empty");
  if (aggregate && sort) fail(ErrorCode::InvalidIR, "aggregate and sort are mutually exclusive");
  if (limit && *limit < 1) fail(ErrorCode::InvalidIR, "limit must be at least 1");
  if (aggregate) {
    if (aggregate->group_by.empty()) fail(ErrorCode::InvalidIR, "aggregate needs a group_by attribute");
    if (aggregate->bins && (aggregate->bins->count == 0 || aggregate->bins->hi < aggregate->bins->lo)) {
      fail(ErrorCode::InvalidIR, "invalid bins");
    }
  }
  if (sort && sort->attribute.empty()) fail(ErrorCode::InvalidIR, "sort needs an attribute");
  for (const auto& f : filters) {
    if (f.attribute.empty()) fail(ErrorCode::InvalidIR, "filter needs an attribute");
    if (f.op == Predicate::Op::contains && !std::holds_alternative<std::string>(f.value)) {
      fail(ErrorCode::InvalidIR, "contains needs a text value");
    }
    if (f.op == Predicate::Op::in_bucket && f.buckets.empty()) fail(ErrorCode::InvalidIR, "in_bucket needs buckets");
  }
}

void QueryIR::validate(const graph::GraphSchema& schema) const {
  validate();
  const auto& label_schema = schema.at(match.label);
  auto check = [&](const std::string& attribute) {
    if (!label_schema.find(attribute)) {
      fail(ErrorCode::UnknownAttribute, "label " + match.label + " has no attribute " + attribute);
    }
  };
  for (const auto& f : filters) check(f.attribute);
  if (aggregate) check(aggregate->group_by);
  if (sort) check(sort->attribute);
}

QueryIR QueryIR::of_ids(std::string label, std::vector<NodeId> ids) {
  QueryIR ir;
  ir.match.label = std::move(label);
  ir.match.anchors = std::move(ids);
  return ir;
}

std::string_view to_string(SortDirection d) noexcept { return d == SortDirection::asc ? "asc" : "desc"; }

std::string cypher_literal(const PropertyValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) {
    std::string out = "'";
    for (char c : *s) {
      if (c == '\'' || c == '\\') out += '\\';
      out += c;
    }
    return out + "'";
  }
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) return format_real(*d);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  std::string out = "[";
  const auto& list = std::get<graph::TextList>(v);
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ", ";
    out += cypher_literal(list[i]);
  }
  return out + "]";
}

std::string render_cypher(const QueryIR& ir) {
  ir.validate();
  const auto& m = ir.match;
  std::string out = "MATCH ";
  const std::string target = "(n:" + name(m.label) + ")";
  if (m.edge) {
    const std::string rel = "[:" + std::string(graph::to_string(m.edge->kind)) + "]";
    switch (m.edge->direction) {
      case graph::Direction::out: out += "(a)-" + rel + "->" + target; break;
      case graph::Direction::in: out += "(a)<-" + rel + "-" + target; break;
      case graph::Direction::both: out += "(a)-" + rel + "-" + target; break;
    }
  } else {
    out += target;
  }
  std::vector<std::string> where;
  if (m.anchors) where.push_back(std::string(m.edge ? "id(a)" : "id(n)") + " IN " + id_list(*m.anchors));
  if (!m.exclude.empty()) where.push_back("NOT id(n) IN " + id_list(m.exclude));
  for (const auto& f : ir.filters) where.push_back(condition(f));
  if (!where.empty()) out += " WHERE " + text::join(where, " AND ");
  const std::string distinct = m.edge ? "DISTINCT " : "";
  if (ir.aggregate) {
    const std::string key =
        ir.aggregate->bins ? bin_expression(ir.aggregate->group_by, *ir.aggregate->bins) : prop(ir.aggregate->group_by);
    out += " RETURN " + key + " AS key, count(" + distinct + "n) AS cnt ORDER BY key";
  } else {
    out += " RETURN " + distinct + "n";
    if (ir.sort) {
      const std::string p = prop(ir.sort->attribute);
      out += " ORDER BY " + p + " IS NULL, " + p + (ir.sort->direction == SortDirection::desc ? " DESC" : "") + ", id(n)";
    }
  }
  if (ir.limit) out += " LIMIT " + std::to_string(*ir.limit);
  return out;
}

json to_json(const Bins& bins) { return json{{"lo", bins.lo}, {"hi", bins.hi}, {"count", bins.count}}; }

json to_json(const BucketKey& key) {
  switch (key.kind) {
    case BucketKey::Kind::missing: return json{{"missing", true}};
    case BucketKey::Kind::value: return json{{"value", graph::to_json(key.value)}};
    case BucketKey::Kind::bin: return json{{"bin", key.bin}, {"bins", to_json(key.bins)}};
  }
  return {};
}

json to_json(const Predicate& p) {
  json out{{"attribute", p.attribute}};
  switch (p.op) {
    case Predicate::Op::has: out["op"] = "has"; break;
    case Predicate::Op::eq: out["op"] = "eq"; out["value"] = graph::to_json(p.value); break;
    case Predicate::Op::contains: out["op"] = "contains"; out["value"] = graph::to_json(p.value); break;
    case Predicate::Op::in_bucket: {
      out["op"] = "in_bucket";
      out["buckets"] = json::array();
      for (const auto& b : p.buckets) out["buckets"].push_back(to_json(b));
      break;
    }
  }
  return out;
}

json to_json(const QueryIR& ir) {
  json match{{"label", ir.match.label}};
  if (ir.match.edge) {
    match["edge"] = {{"kind", graph::to_string(ir.match.edge->kind)},
                     {"direction", graph::to_string(ir.match.edge->direction)}};
  }
  if (ir.match.anchors) match["anchors"] = ids_to_json(*ir.match.anchors);
  if (!ir.match.exclude.empty()) match["exclude"] = ids_to_json(ir.match.exclude);
  json out{{"match", match}, {"filters", json::array()}};
  for (const auto& f : ir.filters) out["filters"].push_back(to_json(f));
  if (ir.aggregate) {
    out["aggregate"] = {{"group_by", ir.aggregate->group_by}, {"op", "count"}};
    if (ir.aggregate->bins) out["aggregate"]["bins"] = to_json(*ir.aggregate->bins);
  }
  if (ir.sort) out["sort"] = {{"attribute", ir.sort->attribute}, {"direction", to_string(ir.sort->direction)}};
  if (ir.limit) out["limit"] = *ir.limit;
  return out;
}

Bins bins_from_json(const json& j) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi") || !j.contains("count") || !j["lo"].is_number() ||
      !j["hi"].is_number() || !j["count"].is_number_unsigned()) {
    fail(ErrorCode::InvalidIR, "bins need numeric lo, hi and count");
  }
  return Bins{j["lo"].get<double>(), j["hi"].get<double>(), j["count"].get<std::size_t>()};
}

BucketKey bucket_key_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidIR, "bucket key must be an object");
  if (j.value("missing", false)) return BucketKey::missing_value();
  if (j.contains("value")) return BucketKey::of(value_or_fail(j["value"]));
  if (j.contains("bin") && j["bin"].is_number_unsigned() && j.contains("bins")) {
    return BucketKey::of_bin(bins_from_json(j["bins"]), j["bin"].get<std::size_t>());
  }
  fail(ErrorCode::InvalidIR, "unrecognized bucket key " + j.dump());
}

Predicate predicate_from_json(const json& j) {
  if (!j.is_object() || !j.contains("op") || !j["op"].is_string() || !j.contains("attribute") ||
      !j["attribute"].is_string()) {
    fail(ErrorCode::InvalidIR, "predicate needs op and attribute");
  }
  const auto op = j["op"].get<std::string>();
  const auto attribute = j["attribute"].get<std::string>();
  if (op == "has") return Predicate::has(attribute);
  if (op == "eq") {
    if (!j.contains("value")) fail(ErrorCode::InvalidIR, "eq needs a value");
    return Predicate::eq(attribute, value_or_fail(j["value"]));
  }
  if (op == "contains") {
    if (!j.contains("value") || !j["value"].is_string()) fail(ErrorCode::InvalidIR, "contains needs a text value");
    return Predicate::contains(attribute, j["value"].get<std::string>());
  }
  if (op == "in_bucket") {
    if (!j.contains("buckets") || !j["buckets"].is_array()) fail(ErrorCode::InvalidIR, "in_bucket needs buckets");
    std::vector<BucketKey> keys;
    for (const auto& b : j["buckets"]) keys.push_back(bucket_key_from_json(b));
    return Predicate::in_bucket(attribute, std::move(keys));
  }
  fail(ErrorCode::InvalidIR, "unknown predicate op " + op);
}

QueryIR query_from_json(const json& j) {
  if (!j.is_object() || !j.contains("match") || !j["match"].is_object()) fail(ErrorCode::InvalidIR, "query needs match");
  QueryIR ir;
  const auto& m = j["match"];
  if (!m.contains("label") || !m["label"].is_string()) fail(ErrorCode::InvalidIR, "match needs a label");
  ir.match.label = m["label"].get<std::string>();
  if (m.contains("edge")) {
    const auto& e = m["edge"];
    auto kind = e.is_object() && e.contains("kind") && e["kind"].is_string()
                    ? graph::parse_edge_kind(e["kind"].get<std::string>())
                    : std::nullopt;
    auto dir = graph::parse_direction(e.is_object() ? e.value("direction", "out") : "");
    if (!kind || !dir) fail(ErrorCode::InvalidIR, "malformed edge pattern");
    ir.match.edge = EdgePattern{*kind, *dir};
  }
  if (m.contains("anchors")) ir.match.anchors = ids_from_json(m["anchors"]);
  if (m.contains("exclude")) ir.match.exclude = ids_from_json(m["exclude"]);
  if (j.contains("filters")) {
    if (!j["filters"].is_array()) fail(ErrorCode::InvalidIR, "filters must be an array");
    for (const auto& f : j["filters"]) ir.filters.push_back(predicate_from_json(f));
  }
  if (j.contains("aggregate")) {
    const auto& a = j["aggregate"];
    if (!a.is_object() || !a.contains("group_by") || !a["group_by"].is_string() || a.value("op", "count") != "count") {
      fail(ErrorCode::InvalidIR, "aggregate needs group_by and op count");
    }
    ir.aggregate = Aggregate{a["group_by"].get<std::string>(), std::nullopt};
    if (a.contains("bins")) ir.aggregate->bins = bins_from_json(a["bins"]);
  }
  if (j.contains("sort")) {
    const auto& s = j["sort"];
    if (!s.is_object() || !s.contains("attribute") || !s["attribute"].is_string()) {
      fail(ErrorCode::InvalidIR, "sort needs an attribute");
    }
    const auto dir = s.value("direction", "asc");
    if (dir != "asc" && dir != "desc") fail(ErrorCode::InvalidIR, "sort direction must be asc or desc");
    ir.sort = Sort{s["attribute"].get<std::string>(), dir == "asc" ? SortDirection::asc : SortDirection::desc};
  }
  if (j.contains("limit")) {
    if (!j["limit"].is_number_integer() || j["limit"].get<long long>() < 1) fail(ErrorCode::InvalidIR, "limit must be >= 1");
    ir.limit = j["limit"].get<std::size_t>();
  }
  ir.validate();
  return ir;
}

}  // namespace graphy::exploration
