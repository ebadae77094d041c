#include <anka/table.hpp>

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace anka {

Schema::Schema(std::vector<Field> fields) : fields_(std::move(fields)) {
    std::unordered_set<std::string> seen;
    for (const auto& field : fields_) {
        if (!seen.insert(field.name).second) {
            throw std::invalid_argument("duplicate field name '" + field.name + "'");
        }
    }
}

auto Schema::index_of(std::string_view name) const -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (fields_[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

auto Schema::find(std::string_view name) const -> const Field* {
    auto idx = index_of(name);
    return idx ? &fields_[*idx] : nullptr;
}

auto Schema::to_string() const -> std::string {
    std::string out = "TABLE[";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += fields_[i].name;
        out += ": ";
        out += type_name(fields_[i].type);
    }
    out += "]";
    return out;
}

auto make_table(Schema schema, std::vector<Row> rows) -> Table {
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != schema.size()) {
            throw TableError("row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                             " values, schema has " + std::to_string(schema.size()) +
                             " columns");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            auto actual = row[c].type();
            if (actual && *actual != schema[c].type) {
                throw TableError("row " + std::to_string(r) + ", column " + schema[c].name +
                                 ": expected " + std::string(type_name(schema[c].type)) +
                                 ", got " + std::string(type_name(*actual)));
            }
        }
    }
    return Table(std::move(schema), std::move(rows));
}

auto make_table_unchecked(Schema schema, std::vector<Row> rows) -> Table {
    return Table(std::move(schema), std::move(rows));
}

namespace {

struct RowHash {
    auto operator()(const Row& row) const noexcept -> std::size_t {
        std::size_t h = row.size();
        for (const auto& v : row) {
            h ^= v.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace

auto table_equal(const Table& left, const Table& right) -> bool {
    return left.schema() == right.schema() && left.rows() == right.rows();
}

auto table_equal_unordered(const Table& left, const Table& right) -> bool {
    if (left.schema() != right.schema() || left.row_count() != right.row_count()) {
        return false;
    }
    std::unordered_map<Row, std::ptrdiff_t, RowHash> counts;
    for (const auto& row : left.rows()) {
        ++counts[row];
    }
    for (const auto& row : right.rows()) {
        auto it = counts.find(row);
        if (it == counts.end() || it->second == 0) {
            return false;
        }
        --it->second;
    }
    return true;
}

auto format_table(const Table& table) -> std::string {
    const auto& schema = table.schema();
    std::vector<std::size_t> widths(schema.size());
    std::vector<std::vector<std::string>> cells;
    for (std::size_t c = 0; c < schema.size(); ++c) {
        widths[c] = schema[c].name.size();
    }
    for (const auto& row : table.rows()) {
        auto& out = cells.emplace_back();
        for (std::size_t c = 0; c < row.size(); ++c) {
            out.push_back(row[c].to_string());
            widths[c] = std::max(widths[c], out.back().size());
        }
    }
    auto line = [&](const std::vector<std::string>& values) {
        std::string s = "|";
        for (std::size_t c = 0; c < values.size(); ++c) {
            s += " " + values[c] + std::string(widths[c] - values[c].size(), ' ') + " |";
        }
        return s + "\n";
    };
    std::vector<std::string> header;
    for (const auto& f : schema.fields()) {
        header.push_back(f.name);
    }
    std::string out = line(header);
    for (const auto& row : cells) {
        out += line(row);
    }
    return out;
}

}  // namespace anka
