#include "goatmix/dataset.hpp"

#include <cmath>
#include <set>

#include "goatmix/errors.hpp"

namespace goatmix {

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::binary: return "binary";
    case ColumnKind::multiclass: return "multiclass";
  }
  return "continuous";
}

ColumnKind parse_column_kind(std::string_view text) {
  if (text == "continuous") return ColumnKind::continuous;
  if (text == "binary") return ColumnKind::binary;
  if (text == "multiclass") return ColumnKind::multiclass;
  throw ConfigError("unknown column kind '" + std::string(text) + "'");
}

void ColumnSchema::validate() const {
  switch (kind) {
    case ColumnKind::continuous:
      if (!categories.empty()) throw DataError("continuous column '" + name + "' must not declare categories");
      break;
    case ColumnKind::binary:
      if (categories.size() != 2)
        throw DataError("binary column '" + name + "' has " + std::to_string(categories.size()) + " categories");
      break;
    case ColumnKind::multiclass:
      if (categories.size() < 3)
        throw DataError("multiclass column '" + name + "' has " + std::to_string(categories.size()) +
                        " categories (need >= 3)");
      break;
  }
  std::set<std::string> seen(categories.begin(), categories.end());
  if (seen.size() != categories.size()) throw DataError("column '" + name + "' has duplicate categories");
}

Schema::Schema(std::vector<ColumnSchema> columns, std::string label)
    : columns_(std::move(columns)), label_(std::move(label)) {
  std::set<std::string> names;
  for (const auto& c : columns_) {
    c.validate();
    if (!names.insert(c.name).second) throw DataError("duplicate column name '" + c.name + "'");
  }
  auto idx = find(label_);
  if (!idx) throw DataError("label column '" + label_ + "' not found");
  if (columns_[*idx].kind != ColumnKind::binary)
    throw DataError("label column '" + label_ + "' must be binary");
  label_index_ = *idx;
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  return std::nullopt;
}

std::vector<std::size_t> Schema::feature_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (i != label_index_) out.push_back(i);
  return out;
}

std::vector<std::string> Schema::feature_names() const {
  std::vector<std::string> out;
  for (auto i : feature_indices()) out.push_back(columns_[i].name);
  return out;
}

bool Schema::has_categorical_features() const {
  for (auto i : feature_indices())
    if (columns_[i].is_categorical()) return true;
  return false;
}

Dataset::Dataset(Schema schema) : schema_(std::move(schema)) {}

Dataset::Dataset(Schema schema, std::vector<double> cells) : schema_(std::move(schema)), cells_(std::move(cells)) {
  const std::size_t cols = schema_.size();
  if (cols == 0) {
    if (!cells_.empty()) throw DataError("cells given for an empty schema");
    return;
  }
  if (cells_.size() % cols != 0) throw DataError("cell count is not a multiple of the column count");
  rows_ = cells_.size() / cols;
  for (std::size_t c = 0; c < cols; ++c) {
    const auto& col = schema_.column(c);
    const double ncat = static_cast<double>(col.categories.size());
    for (std::size_t r = 0; r < rows_; ++r) {
      const double v = cells_[r * cols + c];
      if (!std::isfinite(v)) throw DataError("non-finite value in column '" + col.name + "'");
      if (col.is_categorical() && (v != std::floor(v) || v < 0.0 || v >= ncat))
        throw DataError("category index out of range in column '" + col.name + "'");
    }
  }
}

std::vector<double> Dataset::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
  return out;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = label(r);
  return out;
}

std::pair<std::size_t, std::size_t> Dataset::class_counts() const {
  std::size_t pos = 0;
  for (std::size_t r = 0; r < rows_; ++r) pos += label(r) == 1;
  return {rows_ - pos, pos};
}

FeatureMatrix Dataset::features() const {
  const auto idx = schema_.feature_indices();
  FeatureMatrix m;
  m.rows = rows_;
  m.cols = idx.size();
  m.values.resize(m.rows * m.cols);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t j = 0; j < idx.size(); ++j) m.values[r * m.cols + j] = at(r, idx[j]);
  return m;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  Dataset out(schema_);
  const std::size_t cols = n_cols();
  out.cells_.reserve(rows.size() * cols);
  for (auto r : rows) {
    if (r >= rows_) throw DataError("row index out of range");
    auto src = row(r);
    out.cells_.insert(out.cells_.end(), src.begin(), src.end());
  }
  out.rows_ = rows.size();
  return out;
}

Dataset Dataset::concat(std::span<const Dataset> parts) {
  if (parts.empty()) throw DataError("concat of zero datasets");
  Dataset out(parts.front().schema());
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (!(p.schema() == out.schema_)) throw DataError("schema mismatch in concat");
    total += p.cells_.size();
  }
  out.cells_.reserve(total);
  for (const auto& p : parts) {
    out.cells_.insert(out.cells_.end(), p.cells_.begin(), p.cells_.end());
    out.rows_ += p.rows_;
  }
  return out;
}

}  // namespace goatmix
