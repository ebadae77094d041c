#include "generators.hpp"

namespace anka::testing {

auto uniform(Rng& rng, std::int64_t lo, std::int64_t hi) -> std::int64_t {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

auto chance(Rng& rng, double p) -> bool {
    return std::bernoulli_distribution(p)(rng);
}

auto random_decimal(Rng& rng, int max_scale, int max_digits) -> Decimal {
    int scale = static_cast<int>(uniform(rng, 0, max_scale));
    int digits = static_cast<int>(uniform(rng, 1, max_digits));
    Decimal::Mantissa m = 0;
    for (int i = 0; i < digits; ++i) {
        m = m * 10 + uniform(rng, 0, 9);
    }
    if (chance(rng, 0.4)) {
        m = -m;
    }
    return Decimal(m, scale);
}

auto random_string(Rng& rng, Domain domain) -> std::string {
    if (domain == Domain::Small) {
        static const std::vector<std::string> words = {"a", "b", "c", "", "alpha", "B"};
        return pick(rng, words);
    }
    static const std::vector<std::string> pieces = {
        "a", "Z", "0", " ", ",", "\"", "\n", "\r\n", "\t", "\\", "é", "中", "😀", "x,y", "''", "null"};
    std::string out;
    auto n = uniform(rng, 0, 8);
    for (std::int64_t i = 0; i < n; ++i) {
        out += pick(rng, pieces);
    }
    return out;
}

auto random_value(Rng& rng, ValueType type, Domain domain) -> Value {
    bool small = domain == Domain::Small;
    switch (type) {
        case ValueType::Int:
            return Value(small ? uniform(rng, -2, 4)
                               : uniform(rng, -1'000'000'000'000, 1'000'000'000'000));
        case ValueType::String:
            return Value(random_string(rng, domain));
        case ValueType::Decimal:
            if (small) {
                return Value(Decimal(uniform(rng, -3, 6) * 25, static_cast<int>(uniform(rng, 0, 2))));
            }
            return Value(random_decimal(rng, 10, 20));
        case ValueType::Bool:
            return Value(chance(rng, 0.5));
        case ValueType::Date:
            return Value(Date{static_cast<std::int32_t>(small ? uniform(rng, 19000, 19003)
                                                              : uniform(rng, -719000, 2932000))});
        case ValueType::DateTime:
            return Value(DateTime{small ? uniform(rng, 1'700'000'000, 1'700'000'003)
                                        : uniform(rng, -60'000'000'000, 250'000'000'000)});
    }
    return Value();
}

auto random_schema(Rng& rng, std::size_t min_cols, std::size_t max_cols, const std::string& prefix,
                   const std::vector<ValueType>& types) -> Schema {
    auto n = static_cast<std::size_t>(
        uniform(rng, static_cast<std::int64_t>(min_cols), static_cast<std::int64_t>(max_cols)));
    std::vector<Field> fields;
    for (std::size_t i = 0; i < n; ++i) {
        fields.push_back({prefix + std::to_string(i), pick(rng, types)});
    }
    return Schema(std::move(fields));
}

auto random_table(Rng& rng, const Schema& schema, std::size_t max_rows, Domain domain,
                  double null_rate) -> Table {
    auto n = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(max_rows)));
    std::vector<Row> rows;
    for (std::size_t r = 0; r < n; ++r) {
        Row row;
        for (const auto& f : schema.fields()) {
            row.push_back(chance(rng, null_rate) ? Value() : random_value(rng, f.type, domain));
        }
        rows.push_back(std::move(row));
    }
    return make_table(schema, std::move(rows));
}

auto schema_source(const Schema& schema) -> std::string {
    return schema.to_string();
}

}  // namespace anka::testing
