#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "goatmix/dataset.hpp"

namespace goatmix {

using Json = nlohmann::ordered_json;

struct ColumnHint {
  ColumnKind kind = ColumnKind::continuous;
  /// Optional explicit category order; empty means first-appearance order.
  std::vector<std::string> categories;
};

/// Column typing supplied by a dataset config. Columns not listed are inferred.
struct SchemaHint {
  std::string label;
  std::map<std::string, ColumnHint> columns;
};

/// Reads a schema config file:
///   {"label": "income",
///    "columns": {"age": "continuous",
///                "income": {"kind": "binary", "categories": ["<=50K", ">50K"]}}}
/// A serialized Schema (columns as an array) is accepted as well.
SchemaHint read_schema_hint(const std::filesystem::path& path);
SchemaHint schema_hint_from_json(const Json& j);

/// Parses an RFC-4180 CSV with a header row. Column kinds come from the hint
/// or are inferred: all-numeric -> continuous, otherwise 2 distinct values ->
/// binary and 3+ -> multiclass, categories in first-appearance order. A label
/// column whose two values are numeric is ordered numerically so "0" maps to 0.
Dataset load_csv(const std::filesystem::path& path, const SchemaHint& hint);
Dataset parse_csv(const std::string& text, const SchemaHint& hint);

/// Writes categorical cells as their category strings; numbers round-trip exactly.
void write_csv(const Dataset& d, const std::filesystem::path& path);
std::string to_csv(const Dataset& d);

Json schema_to_json(const Schema& s);
Schema schema_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
/// Two-space indented JSON with a trailing newline.
void write_json(const Json& j, const std::filesystem::path& path);
void write_text(const std::string& text, const std::filesystem::path& path);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace goatmix
