#include "graphy/graph/property.hpp"

#include <sstream>

#include "graphy/error.hpp"

namespace graphy::graph {

ValueType type_of(const PropertyValue& value) noexcept {
  switch (value.index()) {
    case 0: return ValueType::text;
    case 1: return ValueType::integer;
    case 2: return ValueType::real;
    case 3: return ValueType::boolean;
    default: return ValueType::text_list;
  }
}

std::string_view to_string(ValueType type) noexcept {
  switch (type) {
    case ValueType::text: return "text";
    case ValueType::integer: return "integer";
    case ValueType::real: return "real";
    case ValueType::boolean: return "boolean";
    case ValueType::text_list: return "text_list";
  }
  return "text";
}

std::optional<ValueType> parse_value_type(std::string_view name) noexcept {
  if (name == "text") return ValueType::text;
  if (name == "integer") return ValueType::integer;
  if (name == "real") return ValueType::real;
  if (name == "boolean") return ValueType::boolean;
  if (name == "text_list") return ValueType::text_list;
  return std::nullopt;
}

nlohmann::json to_json(const PropertyValue& value) {
  return std::visit([](const auto& v) { return nlohmann::json(v); }, value);
}

nlohmann::json to_json(const Properties& properties) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, value] : properties) out[key] = to_json(value);
  return out;
}

std::optional<PropertyValue> value_from_json(const nlohmann::json& j) {
  if (j.is_string()) return PropertyValue(j.get<std::string>());
  if (j.is_boolean()) return PropertyValue(j.get<bool>());
  if (j.is_number_integer()) return PropertyValue(j.get<std::int64_t>());
  if (j.is_number_float()) return PropertyValue(j.get<double>());
  if (j.is_array()) {
    TextList list;
    for (const auto& item : j) {
      if (!item.is_string()) return std::nullopt;
      list.push_back(item.get<std::string>());
    }
    return PropertyValue(std::move(list));
  }
  return std::nullopt;
}

std::optional<PropertyValue> value_from_json(const nlohmann::json& j, ValueType type) {
  switch (type) {
    case ValueType::text:
      if (j.is_string()) return PropertyValue(j.get<std::string>());
      return std::nullopt;
    case ValueType::integer:
      if (j.is_number_integer()) return PropertyValue(j.get<std::int64_t>());
      return std::nullopt;
    case ValueType::real:
      if (j.is_number()) return PropertyValue(j.get<double>());
      return std::nullopt;
    case ValueType::boolean:
      if (j.is_boolean()) return PropertyValue(j.get<bool>());
      return std::nullopt;
    case ValueType::text_list: {
      if (!j.is_array()) return std::nullopt;
      TextList list;
      for (const auto& item : j) {
        if (!item.is_string()) return std::nullopt;
        list.push_back(item.get<std::string>());
      }
      return PropertyValue(std::move(list));
    }
  }
  return std::nullopt;
}

Properties properties_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::SchemaViolation, "properties must be a JSON object");
  Properties out;
  for (const auto& [key, value] : j.items()) {
    auto converted = value_from_json(value);
    if (!converted) {
      fail(ErrorCode::SchemaViolation, "property '" + key + "' has an unsupported value");
    }
    out.emplace(key, std::move(*converted));
  }
  return out;
}

std::string display(const PropertyValue& value) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      std::ostringstream os;
      os << v;
      return os.str();
    }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const TextList& list) const {
      std::string out;
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out += "; ";
        out += list[i];
      }
      return out;
    }
  };
  return std::visit(Visitor{}, value);
}

}  // namespace graphy::graph
