#include "goatmix/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "goatmix/errors.hpp"

namespace goatmix {
namespace {

using Row = std::vector<std::string>;

std::vector<Row> parse_records(const std::string& text) {
  std::vector<Row> records;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row.front().empty())) records.push_back(std::move(row));
    row.clear();
    ++line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty())
          throw DataError("stray quote inside unquoted field on line " + std::to_string(line));
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return records;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string> first_appearance(const std::vector<Row>& records, std::size_t col) {
  std::vector<std::string> cats;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& v = records[r][col];
    if (seen.emplace(v, cats.size()).second) cats.push_back(v);
  }
  return cats;
}

ColumnKind kind_for_count(std::size_t n, const std::string& name) {
  if (n == 2) return ColumnKind::binary;
  if (n >= 3) return ColumnKind::multiclass;
  throw DataError("column '" + name + "' has a single distinct non-numeric value; cannot infer its kind");
}

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\r\n") != std::string::npos || (!s.empty() && (s.front() == ' ' || s.back() == ' '));
}

std::string quote(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

SchemaHint schema_hint_from_json(const Json& j) {
  SchemaHint hint;
  if (!j.is_object() || !j.contains("label") || !j["label"].is_string())
    throw ConfigError("schema config must be an object with a string 'label'");
  hint.label = j["label"].get<std::string>();
  if (!j.contains("columns")) return hint;
  auto parse_entry = [](const Json& v) {
    ColumnHint h;
    if (v.is_string()) {
      h.kind = parse_column_kind(v.get<std::string>());
    } else if (v.is_object() && v.contains("kind")) {
      h.kind = parse_column_kind(v["kind"].get<std::string>());
      if (v.contains("categories")) h.categories = v["categories"].get<std::vector<std::string>>();
    } else {
      throw ConfigError("column entry must be a kind string or an object with 'kind'");
    }
    return h;
  };
  const auto& cols = j["columns"];
  if (cols.is_object()) {
    for (auto it = cols.begin(); it != cols.end(); ++it) hint.columns[it.key()] = parse_entry(it.value());
  } else if (cols.is_array()) {
    for (const auto& c : cols) hint.columns[c.at("name").get<std::string>()] = parse_entry(c);
  } else {
    throw ConfigError("'columns' must be an object or an array");
  }
  return hint;
}

SchemaHint read_schema_hint(const std::filesystem::path& path) {
  try {
    return schema_hint_from_json(read_json(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid schema config " + path.string() + ": " + e.what());
  }
}

Dataset parse_csv(const std::string& text, const SchemaHint& hint) {
  auto records = parse_records(text);
  if (records.empty()) throw DataError("empty CSV (no header)");
  const Row& header = records.front();
  const std::size_t cols = header.size();
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != cols)
      throw DataError("row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                      " fields, header has " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c)
      if (trim(records[r][c]).empty())
        throw DataError("missing value in row " + std::to_string(r) + ", column '" + header[c] + "'");
  }
  if (records.size() == 1) throw DataError("CSV has a header but no data rows");
  for (const auto& [name, _] : hint.columns)
    if (std::find(header.begin(), header.end(), name) == header.end())
      throw DataError("schema config names column '" + name + "' absent from the CSV header");
  if (std::find(header.begin(), header.end(), hint.label) == header.end())
    throw DataError("label column '" + hint.label + "' not found in CSV header");

  std::vector<ColumnSchema> columns(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    auto& col = columns[c];
    col.name = header[c];
    const bool is_label = col.name == hint.label;
    auto it = hint.columns.find(col.name);
    if (it != hint.columns.end()) {
      col.kind = it->second.kind;
      if (col.is_categorical()) {
        col.categories = it->second.categories;
        auto observed = first_appearance(records, c);
        if (col.categories.empty()) {
          col.categories = std::move(observed);
        } else {
          for (const auto& v : observed)
            if (std::find(col.categories.begin(), col.categories.end(), v) == col.categories.end())
              throw DataError("value '" + v + "' in column '" + col.name + "' is not a declared category");
        }
      }
    } else {
      bool numeric = true;
      for (std::size_t r = 1; r < records.size() && numeric; ++r) numeric = parse_number(records[r][c]).has_value();
      if (numeric && !is_label) {
        col.kind = ColumnKind::continuous;
      } else {
        col.categories = first_appearance(records, c);
        col.kind = kind_for_count(col.categories.size(), col.name);
      }
    }
    if (is_label && col.kind == ColumnKind::binary && col.categories.size() == 2) {
      auto a = parse_number(col.categories[0]);
      auto b = parse_number(col.categories[1]);
      if (a && b && *a > *b) std::swap(col.categories[0], col.categories[1]);
    }
    if (is_label && col.kind != ColumnKind::binary)
      throw DataError("label column '" + col.name + "' must be binary, found " +
                      std::to_string(col.categories.size()) + " distinct values");
    col.validate();
  }
  Schema schema(std::move(columns), hint.label);

  std::vector<double> cells;
  cells.reserve((records.size() - 1) * cols);
  std::vector<std::unordered_map<std::string, double>> lookup(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    const auto& cats = schema.column(c).categories;
    for (std::size_t k = 0; k < cats.size(); ++k) lookup[c].emplace(cats[k], static_cast<double>(k));
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& col = schema.column(c);
      const auto& field = records[r][c];
      if (col.is_categorical()) {
        cells.push_back(lookup[c].at(field));
      } else {
        auto v = parse_number(field);
        if (!v)
          throw DataError("non-numeric value '" + field + "' in continuous column '" + col.name + "' (row " +
                          std::to_string(r) + ")");
        cells.push_back(*v);
      }
    }
  }
  return Dataset(std::move(schema), std::move(cells));
}

Dataset load_csv(const std::filesystem::path& path, const SchemaHint& hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), hint);
}

std::string to_csv(const Dataset& d) {
  std::string out;
  const auto& schema = d.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c) out.push_back(',');
    out += quote(schema.column(c).name);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (c) out.push_back(',');
      const auto& col = schema.column(c);
      const double v = d.at(r, c);
      out += col.is_categorical() ? quote(col.categories[static_cast<std::size_t>(v)]) : format_double(v);
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const Dataset& d, const std::filesystem::path& path) { write_text(to_csv(d), path); }

Json schema_to_json(const Schema& s) {
  Json cols = Json::array();
  for (const auto& c : s.columns()) {
    Json e = {{"name", c.name}, {"kind", std::string(to_string(c.kind))}};
    if (c.is_categorical()) e["categories"] = c.categories;
    cols.push_back(std::move(e));
  }
  return Json{{"label", s.label()}, {"columns", std::move(cols)}};
}

Schema schema_from_json(const Json& j) {
  std::vector<ColumnSchema> cols;
  for (const auto& e : j.at("columns")) {
    ColumnSchema c;
    c.name = e.at("name").get<std::string>();
    c.kind = parse_column_kind(e.at("kind").get<std::string>());
    if (e.contains("categories")) c.categories = e["categories"].get<std::vector<std::string>>();
    cols.push_back(std::move(c));
  }
  return Schema(std::move(cols), j.at("label").get<std::string>());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const Json& j, const std::filesystem::path& path) { write_text(j.dump(2) + "\n", path); }

void write_text(const std::string& text, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace goatmix
