#include <anka/io.hpp>

#include <charconv>
#include <optional>
#include <variant>

namespace anka {

namespace {

using nlohmann::ordered_json;

// A scalar as it appeared in the document. Numbers keep their source text.
struct Number {
    std::string text;
    bool integral;
};
using Cell = std::variant<std::monostate, bool, Number, std::string>;

auto describe(const Cell& c) -> std::string_view {
    switch (c.index()) {
        case 0: return "null";
        case 1: return "a boolean";
        case 2: return "a number";
        default: return "a string";
    }
}

// "1.5e3" -> "1500", "25E-2" -> "0.25"; plain numbers pass through.
auto expand_exponent(const std::string& text) -> std::string {
    auto e = text.find_first_of("eE");
    if (e == std::string::npos) {
        return text;
    }
    std::string mant = text.substr(0, e);
    int exp = 0;
    std::string_view ex(text.data() + e + 1, text.size() - e - 1);
    if (!ex.empty() && ex.front() == '+') {
        ex.remove_prefix(1);
    }
    auto [p, ec] = std::from_chars(ex.data(), ex.data() + ex.size(), exp);
    if (ec != std::errc() || p != ex.data() + ex.size() || exp > 40 || exp < -40) {
        throw DecimalError("exponent out of range");
    }
    bool neg = !mant.empty() && mant.front() == '-';
    if (neg) {
        mant.erase(0, 1);
    }
    auto dot = mant.find('.');
    std::string digits = mant;
    int frac = 0;
    if (dot != std::string::npos) {
        digits = mant.substr(0, dot) + mant.substr(dot + 1);
        frac = static_cast<int>(mant.size() - dot - 1);
    }
    frac -= exp;
    if (frac <= 0) {
        digits.append(static_cast<std::size_t>(-frac), '0');
        frac = 0;
    } else if (static_cast<std::size_t>(frac) >= digits.size()) {
        digits.insert(0, static_cast<std::size_t>(frac) - digits.size() + 1, '0');
    }
    std::string out = neg ? "-" : "";
    out += digits.substr(0, digits.size() - static_cast<std::size_t>(frac));
    if (frac > 0) {
        out += "." + digits.substr(digits.size() - static_cast<std::size_t>(frac));
    }
    return out;
}

auto convert(const Cell& cell, ValueType type, std::size_t row, const std::string& field)
    -> Value {
    if (std::holds_alternative<std::monostate>(cell)) {
        return Value();
    }
    auto fail = [&](std::string_view detail) -> DataFormatError {
        return DataFormatError("row " + std::to_string(row) + ", field '" + field + "': " +
                               std::string(detail));
    };
    auto mismatch = [&] {
        return fail("expected " + std::string(type_name(type)) + ", got " +
                    std::string(describe(cell)));
    };
    switch (type) {
        case ValueType::Int: {
            const auto* n = std::get_if<Number>(&cell);
            if (n == nullptr || !n->integral) {
                throw mismatch();
            }
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(n->text.data(), n->text.data() + n->text.size(), v);
            if (ec != std::errc() || p != n->text.data() + n->text.size()) {
                throw fail("integer " + n->text + " is out of range");
            }
            return Value(v);
        }
        case ValueType::Decimal: {
            std::string text;
            if (const auto* n = std::get_if<Number>(&cell)) {
                text = n->text;
            } else if (const auto* s = std::get_if<std::string>(&cell)) {
                text = *s;
            } else {
                throw mismatch();
            }
            try {
                return Value(Decimal::parse(expand_exponent(text)));
            } catch (const DecimalError& e) {
                throw fail("invalid DECIMAL \"" + text + "\": " + e.what());
            }
        }
        case ValueType::String:
            if (const auto* s = std::get_if<std::string>(&cell)) {
                return Value(*s);
            }
            throw mismatch();
        case ValueType::Bool:
            if (const auto* b = std::get_if<bool>(&cell)) {
                return Value(*b);
            }
            throw mismatch();
        case ValueType::Date:
            if (const auto* s = std::get_if<std::string>(&cell)) {
                if (auto d = Date::parse(*s)) {
                    return Value(*d);
                }
                throw fail("invalid DATE \"" + *s + "\"");
            }
            throw mismatch();
        case ValueType::DateTime:
            if (const auto* s = std::get_if<std::string>(&cell)) {
                if (auto d = DateTime::parse(*s)) {
                    return Value(*d);
                }
                throw fail("invalid DATETIME \"" + *s + "\"");
            }
            throw mismatch();
    }
    throw mismatch();
}

// Collects the cells of one object in schema order.
class RowBuilder {
public:
    explicit RowBuilder(const Schema& schema) : schema_(schema) {}

    void begin() { cells_.assign(schema_.size(), Cell{}); }
    void set(const std::string& key, Cell cell) {
        if (auto idx = schema_.index_of(key)) {
            cells_[*idx] = std::move(cell);
        }
    }
    auto finish(std::size_t row) const -> Row {
        Row out;
        out.reserve(cells_.size());
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            out.push_back(convert(cells_[i], schema_[i].type, row, schema_[i].name));
        }
        return out;
    }

private:
    const Schema& schema_;
    std::vector<Cell> cells_;
};

class TableSax : public nlohmann::json_sax<nlohmann::json> {
public:
    explicit TableSax(const Schema& schema) : builder_(schema) {}

    auto rows() -> std::vector<Row>& { return rows_; }

    auto null() -> bool override { return scalar(std::monostate{}); }
    auto boolean(bool v) -> bool override { return scalar(v); }
    auto number_integer(number_integer_t v) -> bool override {
        return scalar(Number{std::to_string(v), true});
    }
    auto number_unsigned(number_unsigned_t v) -> bool override {
        return scalar(Number{std::to_string(v), true});
    }
    auto number_float(number_float_t, const string_t& s) -> bool override {
        return scalar(Number{s, false});
    }
    auto string(string_t& v) -> bool override { return scalar(std::move(v)); }
    auto binary(binary_t&) -> bool override { return structure("binary data"); }

    auto start_object(std::size_t) -> bool override {
        if (depth_ != 1) {
            return structure("nested object");
        }
        depth_ = 2;
        builder_.begin();
        return true;
    }
    auto key(string_t& k) -> bool override {
        key_ = std::move(k);
        return true;
    }
    auto end_object() -> bool override {
        depth_ = 1;
        rows_.push_back(builder_.finish(rows_.size()));
        return true;
    }
    auto start_array(std::size_t) -> bool override {
        if (depth_ != 0) {
            return structure("nested array");
        }
        depth_ = 1;
        return true;
    }
    auto end_array() -> bool override {
        depth_ = 0;
        return true;
    }
    auto parse_error(std::size_t position, const std::string&,
                     const nlohmann::detail::exception& ex) -> bool override {
        throw DataFormatError("malformed JSON at byte " + std::to_string(position) + ": " +
                              ex.what());
    }

private:
    auto scalar(Cell c) -> bool {
        if (depth_ != 2) {
            return structure(depth_ == 0 ? "top-level value is not an array"
                                         : "array element is not an object");
        }
        builder_.set(key_, std::move(c));
        return true;
    }
    auto structure(std::string_view what) const -> bool {
        std::string where = depth_ >= 1 ? "row " + std::to_string(rows_.size()) + ": " : "";
        if (depth_ == 2) {
            where += "field '" + key_ + "': ";
        }
        throw DataFormatError(where + "expected an array of flat objects (" + std::string(what) +
                              ")");
    }

    RowBuilder builder_;
    std::vector<Row> rows_;
    std::string key_;
    int depth_ = 0;
};

auto cell_from(const ordered_json& j) -> Cell {
    switch (j.type()) {
        case ordered_json::value_t::null: return std::monostate{};
        case ordered_json::value_t::boolean: return j.get<bool>();
        case ordered_json::value_t::number_integer:
        case ordered_json::value_t::number_unsigned: return Number{j.dump(), true};
        case ordered_json::value_t::number_float: return Number{j.dump(), false};
        case ordered_json::value_t::string: return j.get<std::string>();
        default: throw DataFormatError("nested value");
    }
}

}  // namespace

auto table_from_json(std::string_view bytes, const Schema& schema) -> Table {
    TableSax sax(schema);
    nlohmann::json::sax_parse(bytes.begin(), bytes.end(), &sax);
    return make_table_unchecked(schema, std::move(sax.rows()));
}

auto table_from_json_value(const ordered_json& rows, const Schema& schema) -> Table {
    if (!rows.is_array()) {
        throw DataFormatError("expected an array of flat objects");
    }
    RowBuilder builder(schema);
    std::vector<Row> out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& obj = rows[r];
        if (!obj.is_object()) {
            throw DataFormatError("row " + std::to_string(r) + ": expected an object");
        }
        builder.begin();
        for (const auto& [key, value] : obj.items()) {
            try {
                builder.set(key, cell_from(value));
            } catch (const DataFormatError& e) {
                throw DataFormatError("row " + std::to_string(r) + ", field '" + key +
                                      "': " + e.what());
            }
        }
        out.push_back(builder.finish(r));
    }
    return make_table_unchecked(schema, std::move(out));
}

auto table_to_json_value(const Table& table) -> ordered_json {
    auto out = ordered_json::array();
    const auto& fields = table.schema().fields();
    for (const auto& row : table.rows()) {
        ordered_json obj = ordered_json::object();
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const Value& v = row[i];
            ordered_json cell;
            if (!v.is_null()) {
                switch (*v.type()) {
                    case ValueType::Int: cell = v.as_int(); break;
                    case ValueType::Bool: cell = v.as_bool(); break;
                    case ValueType::String: cell = v.as_string(); break;
                    case ValueType::Decimal:
                    case ValueType::Date:
                    case ValueType::DateTime: cell = v.to_string(); break;
                }
            }
            obj[fields[i].name] = std::move(cell);
        }
        out.push_back(std::move(obj));
    }
    return out;
}

auto table_to_json(const Table& table) -> std::string {
    return table_to_json_value(table).dump();
}

}  // namespace anka
