#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "graphy/graph/property.hpp"

namespace graphy::inspection {

enum class OutputKind { single_typed, array_typed };

struct OutputField {
  std::string name;
  graph::ValueType type = graph::ValueType::text;
  friend bool operator==(const OutputField&, const OutputField&) = default;
};

struct OutputSchema {
  OutputKind kind = OutputKind::single_typed;
  std::vector<OutputField> fields;  // declaration order
  std::set<std::string> required;

  const OutputField* find(std::string_view name) const;
  /// First text field in declaration order, or empty.
  std::string primary_text_field() const;

  friend bool operator==(const OutputSchema&, const OutputSchema&) = default;
};

/// Parses {"single_typed"|"array_typed": {field: type}, "required": [...]}.
/// Field types: text, integer, real, boolean. Without "required" every field
/// is required. Throws MalformedConfig.
OutputSchema parse_output_schema(const nlohmann::json& j);
nlohmann::json to_json(const OutputSchema& schema);

/// JSON Schema rendering used in prompts.
nlohmann::json describe(const OutputSchema& schema);

/// Checks `raw` against the schema. Returns an object (single_typed) or an
/// array of objects (array_typed) holding only declared keys. Numeric strings
/// coerce to integer/real; integral reals coerce to integer. Nulls count as
/// absent. Throws MissingRequired or TypeMismatch.
nlohmann::json validate_output(const nlohmann::json& raw, const OutputSchema& schema);

/// Converts one validated object to graph properties.
graph::Properties to_properties(const nlohmann::json& object, const OutputSchema& schema);

/// Finds the first JSON value in model text: a fenced ```json block or the
/// first balanced object/array. Returns a discarded value when none parses.
nlohmann::json parse_json_from_text(std::string_view raw);

}  // namespace graphy::inspection
