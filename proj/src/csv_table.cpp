#include <anka/io.hpp>

#include <charconv>

namespace anka {

namespace {

struct CsvField {
    std::string text;
    bool quoted = false;
};

struct CsvRecord {
    std::vector<CsvField> fields;
    std::size_t line = 0;
};

class CsvReader {
public:
    explicit CsvReader(std::string_view bytes) : in_(bytes) {}

    // False at end of input.
    auto next(CsvRecord& rec) -> bool {
        if (pos_ >= in_.size()) {
            return false;
        }
        rec.fields.clear();
        rec.line = line_;
        CsvField field;
        bool after_quote = false;
        while (true) {
            if (pos_ >= in_.size()) {
                rec.fields.push_back(std::move(field));
                return true;
            }
            char c = in_[pos_];
            if (c == '\r' || c == '\n') {
                pos_ += (c == '\r' && pos_ + 1 < in_.size() && in_[pos_ + 1] == '\n') ? 2 : 1;
                ++line_;
                rec.fields.push_back(std::move(field));
                return true;
            }
            if (c == ',') {
                ++pos_;
                rec.fields.push_back(std::move(field));
                field = CsvField{};
                after_quote = false;
                continue;
            }
            if (after_quote) {
                throw error("unexpected character after closing quote");
            }
            if (c == '"') {
                if (!field.text.empty()) {
                    throw error("quote inside an unquoted field");
                }
                ++pos_;
                quoted(field);
                after_quote = true;
                continue;
            }
            field.text.push_back(c);
            ++pos_;
        }
    }

    [[nodiscard]] auto error(std::string_view what) const -> DataFormatError {
        return DataFormatError("line " + std::to_string(line_) + ": " + std::string(what));
    }

private:
    void quoted(CsvField& field) {
        std::size_t start_line = line_;
        field.quoted = true;
        while (pos_ < in_.size()) {
            char c = in_[pos_++];
            if (c == '"') {
                if (pos_ < in_.size() && in_[pos_] == '"') {
                    field.text.push_back('"');
                    ++pos_;
                    continue;
                }
                return;
            }
            if (c == '\n') {
                ++line_;
            }
            field.text.push_back(c);
        }
        throw DataFormatError("line " + std::to_string(start_line) + ": unterminated quoted field");
    }

    std::string_view in_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

auto parse_cell(const CsvField& f, const Field& column, std::size_t line) -> Value {
    if (f.text.empty() && !f.quoted) {
        return Value();
    }
    auto fail = [&](std::string_view what) {
        return DataFormatError("line " + std::to_string(line) + ", field '" + column.name +
                               "': " + std::string(what) + " \"" + f.text + "\"");
    };
    const std::string& t = f.text;
    switch (column.type) {
        case ValueType::String:
            return Value(t);
        case ValueType::Int: {
            std::int64_t v = 0;
            const char* b = t.data();
            const char* e = t.data() + t.size();
            if (b != e && *b == '+') {
                ++b;
            }
            auto [p, ec] = std::from_chars(b, e, v);
            if (ec != std::errc() || p != e || b == e) {
                throw fail("invalid INT");
            }
            return Value(v);
        }
        case ValueType::Decimal:
            try {
                return Value(Decimal::parse(t));
            } catch (const DecimalError&) {
                throw fail("invalid DECIMAL");
            }
        case ValueType::Bool:
            if (t == "true" || t == "TRUE") {
                return Value(true);
            }
            if (t == "false" || t == "FALSE") {
                return Value(false);
            }
            throw fail("invalid BOOL");
        case ValueType::Date:
            if (auto d = Date::parse(t)) {
                return Value(*d);
            }
            throw fail("invalid DATE");
        case ValueType::DateTime:
            if (auto d = DateTime::parse(t)) {
                return Value(*d);
            }
            throw fail("invalid DATETIME");
    }
    throw fail("invalid value");
}

void write_field(std::string& out, const std::string& text, bool force_quotes) {
    bool quote = force_quotes || text.find_first_of(",\"\r\n") != std::string::npos;
    if (!quote) {
        out += text;
        return;
    }
    out.push_back('"');
    for (char c : text) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
}

}  // namespace

auto table_from_csv(std::string_view bytes, const Schema& schema) -> Table {
    CsvReader reader(bytes);
    CsvRecord rec;
    if (!reader.next(rec)) {
        throw DataFormatError("line 1: missing header");
    }
    std::string expected;
    std::string found;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        expected += (i ? "," : "") + schema[i].name;
    }
    for (std::size_t i = 0; i < rec.fields.size(); ++i) {
        found += (i ? "," : "") + rec.fields[i].text;
    }
    bool match = rec.fields.size() == schema.size();
    for (std::size_t i = 0; match && i < schema.size(); ++i) {
        match = rec.fields[i].text == schema[i].name;
    }
    if (!match) {
        throw DataFormatError("line " + std::to_string(rec.line) + ": header \"" + found +
                              "\" does not match schema columns \"" + expected + "\"");
    }
    std::vector<Row> rows;
    while (reader.next(rec)) {
        if (rec.fields.size() != schema.size()) {
            throw DataFormatError("line " + std::to_string(rec.line) + ": expected " +
                                  std::to_string(schema.size()) + " fields, found " +
                                  std::to_string(rec.fields.size()));
        }
        Row row;
        row.reserve(schema.size());
        for (std::size_t i = 0; i < schema.size(); ++i) {
            row.push_back(parse_cell(rec.fields[i], schema[i], rec.line));
        }
        rows.push_back(std::move(row));
    }
    return make_table_unchecked(schema, std::move(rows));
}

auto table_to_csv(const Table& table) -> std::string {
    std::string out;
    const auto& fields = table.schema().fields();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) {
            out.push_back(',');
        }
        write_field(out, fields[i].name, false);
    }
    out.push_back('\n');
    for (const auto& row : table.rows()) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                out.push_back(',');
            }
            if (row[i].is_null()) {
                continue;
            }
            if (row[i].type() == ValueType::String) {
                write_field(out, row[i].as_string(), row[i].as_string().empty());
            } else {
                out += row[i].to_string();
            }
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace anka
