#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace graphy::graph {

enum class ValueType { text, integer, real, boolean, text_list };

using TextList = std::vector<std::string>;
using PropertyValue = std::variant<std::string, std::int64_t, double, bool, TextList>;
using Properties = std::map<std::string, PropertyValue>;

ValueType type_of(const PropertyValue& value) noexcept;
std::string_view to_string(ValueType type) noexcept;
std::optional<ValueType> parse_value_type(std::string_view name) noexcept;

nlohmann::json to_json(const PropertyValue& value);
nlohmann::json to_json(const Properties& properties);

/// Infers the value type from the JSON type. Returns nullopt for null,
/// objects, and arrays containing non-strings.
std::optional<PropertyValue> value_from_json(const nlohmann::json& j);

/// Strict conversion to a declared type (no string coercion).
std::optional<PropertyValue> value_from_json(const nlohmann::json& j, ValueType type);

Properties properties_from_json(const nlohmann::json& j);

/// Human-readable rendering: text verbatim, lists joined with "; ".
std::string display(const PropertyValue& value);

}  // namespace graphy::graph
