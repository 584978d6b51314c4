#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace goatmix {

enum class ColumnKind { continuous, binary, multiclass };

std::string_view to_string(ColumnKind kind);
/// Parses "continuous" | "binary" | "multiclass"; throws ConfigError otherwise.
ColumnKind parse_column_kind(std::string_view text);

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  /// Ordered category labels; a cell stores the index into this list.
  std::vector<std::string> categories;

  bool is_categorical() const noexcept { return kind != ColumnKind::continuous; }
  /// Checks the category-count rule for the declared kind.
  void validate() const;

  bool operator==(const ColumnSchema&) const = default;
};

/// Column layout of a table plus the name of its binary outcome column.
class Schema {
 public:
  Schema() = default;
  Schema(std::vector<ColumnSchema> columns, std::string label);

  const std::vector<ColumnSchema>& columns() const noexcept { return columns_; }
  const ColumnSchema& column(std::size_t i) const { return columns_.at(i); }
  std::size_t size() const noexcept { return columns_.size(); }
  const std::string& label() const noexcept { return label_; }
  std::size_t label_index() const noexcept { return label_index_; }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Every column except the label, in schema order.
  std::vector<std::size_t> feature_indices() const;
  std::vector<std::string> feature_names() const;
  bool has_categorical_features() const;

  bool operator==(const Schema&) const = default;

 private:
  std::vector<ColumnSchema> columns_;
  std::string label_;
  std::size_t label_index_ = 0;
};

/// Dense row-major numeric matrix of feature values handed to the classifier.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
};

/// Immutable table. Continuous cells hold numbers; categorical cells hold the
/// category index as an exact small integer.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Schema schema);
  /// Validates every cell against the schema; throws DataError on violation.
  Dataset(Schema schema, std::vector<double> cells);

  const Schema& schema() const noexcept { return schema_; }
  std::size_t n_rows() const noexcept { return rows_; }
  std::size_t n_cols() const noexcept { return schema_.size(); }
  bool empty() const noexcept { return rows_ == 0; }

  double at(std::size_t r, std::size_t c) const { return cells_[r * n_cols() + c]; }
  std::span<const double> row(std::size_t r) const { return {cells_.data() + r * n_cols(), n_cols()}; }
  std::span<const double> cells() const noexcept { return cells_; }
  std::vector<double> column(std::size_t c) const;

  int label(std::size_t r) const { return static_cast<int>(at(r, schema_.label_index())); }
  std::vector<int> labels() const;
  /// Number of rows per label class {count(0), count(1)}.
  std::pair<std::size_t, std::size_t> class_counts() const;

  /// Non-label columns as numbers; categorical columns use their index (label encoding).
  FeatureMatrix features() const;

  Dataset select_rows(std::span<const std::size_t> rows) const;
  /// Stacks datasets vertically in the given order. All schemas must match.
  static Dataset concat(std::span<const Dataset> parts);

  bool operator==(const Dataset&) const = default;

 private:
  Schema schema_;
  std::vector<double> cells_;
  std::size_t rows_ = 0;
};

}  // namespace goatmix
