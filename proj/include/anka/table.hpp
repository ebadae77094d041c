#pragma once

#include <anka/value.hpp>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace anka {

struct Field {
    std::string name;
    ValueType type;

    friend auto operator==(const Field&, const Field&) -> bool = default;
};

/// Ordered list of uniquely named, typed columns.
class Schema {
public:
    Schema() = default;
    /// Throws std::invalid_argument on duplicate field names.
    explicit Schema(std::vector<Field> fields);

    [[nodiscard]] auto fields() const noexcept -> const std::vector<Field>& { return fields_; }
    [[nodiscard]] auto size() const noexcept -> std::size_t { return fields_.size(); }
    [[nodiscard]] auto empty() const noexcept -> bool { return fields_.empty(); }
    [[nodiscard]] auto operator[](std::size_t i) const -> const Field& { return fields_[i]; }
    [[nodiscard]] auto index_of(std::string_view name) const -> std::optional<std::size_t>;
    [[nodiscard]] auto find(std::string_view name) const -> const Field*;

    /// `TABLE[a: INT, b: STRING]`
    [[nodiscard]] auto to_string() const -> std::string;

    friend auto operator==(const Schema&, const Schema&) -> bool = default;

private:
    std::vector<Field> fields_;
};

using Row = std::vector<Value>;

class TableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable schema plus ordered rows. Every row has one cell per field and
/// every non-null cell has its column's type.
class Table {
public:
    /// An empty table with no columns.
    Table() = default;

    [[nodiscard]] auto schema() const noexcept -> const Schema& { return schema_; }
    [[nodiscard]] auto rows() const noexcept -> const std::vector<Row>& { return rows_; }
    [[nodiscard]] auto row_count() const noexcept -> std::size_t { return rows_.size(); }
    [[nodiscard]] auto column_count() const noexcept -> std::size_t { return schema_.size(); }
    [[nodiscard]] auto at(std::size_t row, std::size_t col) const -> const Value& {
        return rows_[row][col];
    }

    friend auto make_table(Schema schema, std::vector<Row> rows) -> Table;
    friend auto make_table_unchecked(Schema schema, std::vector<Row> rows) -> Table;

private:
    Table(Schema schema, std::vector<Row> rows)
        : schema_(std::move(schema)), rows_(std::move(rows)) {}

    Schema schema_;
    std::vector<Row> rows_;
};

/// Validates arity and cell types. Throws TableError naming the offending
/// row (and column, expected and actual type for type mismatches).
auto make_table(Schema schema, std::vector<Row> rows) -> Table;

/// For operators whose output is correct by construction.
auto make_table_unchecked(Schema schema, std::vector<Row> rows) -> Table;

/// Schemas equal and rows pairwise equal in order.
auto table_equal(const Table& left, const Table& right) -> bool;

/// Schemas equal and rows equal as multisets.
auto table_equal_unordered(const Table& left, const Table& right) -> bool;

/// Plain-text grid for diagnostics.
auto format_table(const Table& table) -> std::string;

}  // namespace anka
