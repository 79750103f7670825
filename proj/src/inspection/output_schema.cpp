#include "graphy/inspection/output_schema.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "graphy/error.hpp"
#include "graphy/text.hpp"

namespace graphy::inspection {

using nlohmann::json;
using graph::ValueType;

const OutputField* OutputSchema::find(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::string OutputSchema::primary_text_field() const {
  for (const auto& f : fields) {
    if (f.type == ValueType::text) return f.name;
  }
  return {};
}

OutputSchema parse_output_schema(const json& j) {
  if (!j.is_object()) fail(ErrorCode::MalformedConfig, "output_schema must be an object");
  OutputSchema schema;
  const bool single = j.contains("single_typed");
  const bool array = j.contains("array_typed");
  if (single == array) {
    fail(ErrorCode::MalformedConfig, "output_schema needs exactly one of single_typed or array_typed");
  }
  schema.kind = single ? OutputKind::single_typed : OutputKind::array_typed;
  const json& fields = j.at(single ? "single_typed" : "array_typed");
  if (!fields.is_object() || fields.empty()) fail(ErrorCode::MalformedConfig, "output_schema fields must be a non-empty object");
  // nlohmann sorts object keys; keep the author's order when it is given as "order".
  std::vector<std::string> names;
  if (j.contains("order") && j["order"].is_array()) {
    for (const auto& n : j["order"]) names.push_back(n.get<std::string>());
  }
  for (const auto& [name, _] : fields.items()) {
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
  }
  for (const auto& name : names) {
    if (!fields.contains(name)) fail(ErrorCode::MalformedConfig, "order names unknown field " + name);
    const json& t = fields[name];
    if (!t.is_string()) fail(ErrorCode::MalformedConfig, "field type must be a string: " + name);
    auto type = graph::parse_value_type(t.get<std::string>());
    if (!type || *type == ValueType::text_list) {
      fail(ErrorCode::MalformedConfig, "unsupported field type for " + name + ": " + t.get<std::string>());
    }
    schema.fields.push_back(OutputField{name, *type});
  }
  if (j.contains("required")) {
    if (!j["required"].is_array()) fail(ErrorCode::MalformedConfig, "required must be an array");
    for (const auto& r : j["required"]) {
      if (!r.is_string() || !schema.find(r.get<std::string>())) {
        fail(ErrorCode::MalformedConfig, "required names an undeclared field");
      }
      schema.required.insert(r.get<std::string>());
    }
  } else {
    for (const auto& f : schema.fields) schema.required.insert(f.name);
  }
  return schema;
}

json to_json(const OutputSchema& schema) {
  json fields = json::object();
  json order = json::array();
  for (const auto& f : schema.fields) {
    fields[f.name] = std::string(graph::to_string(f.type));
    order.push_back(f.name);
  }
  json out;
  out[schema.kind == OutputKind::single_typed ? "single_typed" : "array_typed"] = fields;
  out["required"] = json(std::vector<std::string>(schema.required.begin(), schema.required.end()));
  out["order"] = order;
  return out;
}

json describe(const OutputSchema& schema) {
  json props = json::object();
  for (const auto& f : schema.fields) {
    const char* t = "string";
    if (f.type == ValueType::integer) t = "integer";
    if (f.type == ValueType::real) t = "number";
    if (f.type == ValueType::boolean) t = "boolean";
    props[f.name] = {{"type", t}};
  }
  json object = {{"type", "object"},
                 {"properties", props},
                 {"required", std::vector<std::string>(schema.required.begin(), schema.required.end())}};
  if (schema.kind == OutputKind::single_typed) return object;
  return {{"type", "array"}, {"items", object}};
}

namespace {

std::optional<json> coerce(const json& v, ValueType type) {
  switch (type) {
    case ValueType::text:
      if (v.is_string()) return v;
      return std::nullopt;
    case ValueType::boolean:
      if (v.is_boolean()) return v;
      return std::nullopt;
    case ValueType::integer: {
      if (v.is_number_integer()) return json(v.get<std::int64_t>());
      if (v.is_number_float()) {
        double d = v.get<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15) return json(static_cast<std::int64_t>(d));
        return std::nullopt;
      }
      if (v.is_string()) {
        std::string s = text::trim(v.get<std::string>());
        std::int64_t out = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (!s.empty() && ec == std::errc() && p == s.data() + s.size()) return json(out);
      }
      return std::nullopt;
    }
    case ValueType::real: {
      if (v.is_number()) return json(v.get<double>());
      if (v.is_string()) {
        std::string s = text::trim(v.get<std::string>());
        if (s.empty()) return std::nullopt;
        try {
          std::size_t used = 0;
          double d = std::stod(s, &used);
          if (used == s.size() && std::isfinite(d)) return json(d);
        } catch (const std::exception&) {
        }
      }
      return std::nullopt;
    }
    case ValueType::text_list:
      break;
  }
  return std::nullopt;
}

json validate_object(const json& raw, const OutputSchema& schema) {
  if (!raw.is_object()) fail(ErrorCode::TypeMismatch, "expected an object, got " + std::string(raw.type_name()));
  json out = json::object();
  for (const auto& f : schema.fields) {
    auto it = raw.find(f.name);
    if (it == raw.end() || it->is_null()) continue;
    auto v = coerce(*it, f.type);
    if (!v) {
      fail(ErrorCode::TypeMismatch,
           "field " + f.name + " expects " + std::string(graph::to_string(f.type)) + ", got " + it->dump());
    }
    out[f.name] = *v;
  }
  for (const auto& r : schema.required) {
    if (!out.contains(r)) fail(ErrorCode::MissingRequired, "missing required field " + r);
  }
  return out;
}

}  // namespace

json validate_output(const json& raw, const OutputSchema& schema) {
  if (schema.kind == OutputKind::single_typed) return validate_object(raw, schema);
  const json* items = &raw;
  // Accept a single-key wrapper object such as {"items": [...]}.
  if (raw.is_object() && raw.size() == 1 && raw.begin()->is_array()) items = &*raw.begin();
  if (!items->is_array()) fail(ErrorCode::TypeMismatch, "expected an array, got " + std::string(raw.type_name()));
  json out = json::array();
  for (const auto& item : *items) out.push_back(validate_object(item, schema));
  return out;
}

graph::Properties to_properties(const json& object, const OutputSchema& schema) {
  graph::Properties props;
  for (const auto& f : schema.fields) {
    auto it = object.find(f.name);
    if (it == object.end() || it->is_null()) continue;
    auto v = graph::value_from_json(*it, f.type);
    if (!v) fail(ErrorCode::TypeMismatch, "field " + f.name + " has the wrong type");
    props.emplace(f.name, std::move(*v));
  }
  return props;
}

namespace {

std::optional<json> try_parse(std::string_view s) {
  json j = json::parse(s.begin(), s.end(), nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

std::size_t balanced_end(std::string_view s, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{' || c == '[') ++depth;
    else if (c == '}' || c == ']') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

}  // namespace

json parse_json_from_text(std::string_view raw) {
  if (auto whole = try_parse(raw)) return *whole;
  auto fence = raw.find("```");
  if (fence != std::string_view::npos) {
    auto body = raw.find('\n', fence);
    auto close = body == std::string_view::npos ? body : raw.find("```", body);
    if (close != std::string_view::npos) {
      if (auto j = try_parse(raw.substr(body + 1, close - body - 1))) return *j;
    }
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '{' && raw[i] != '[') continue;
    auto end = balanced_end(raw, i);
    if (end == std::string_view::npos) continue;
    if (auto j = try_parse(raw.substr(i, end - i))) return *j;
  }
  return json(json::value_t::discarded);
}

}  // namespace graphy::inspection
