#include <anka/interpreter.hpp>
#include <anka/validator.hpp>

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace anka::ops {

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

auto column_index(const Schema& schema, const std::string& name) -> std::size_t {
    auto idx = schema.index_of(name);
    if (!idx) {
        throw InternalError("unknown column '" + name + "' in " + schema.to_string());
    }
    return *idx;
}

auto row_var_schemas(const RowVars& vars) -> std::map<std::string, Schema, std::less<>> {
    std::map<std::string, Schema, std::less<>> out;
    for (const auto& [name, ref] : vars) {
        out.emplace(name, *ref.schema);
    }
    return out;
}

auto static_type(const Expr& expr, const Schema& row, const RowVars& vars) -> ExprType {
    auto schemas = row_var_schemas(vars);
    try {
        return typecheck_expr(expr, TypeScope{&row, &schemas});
    } catch (const TypeCheckError& e) {
        throw InternalError(e.what());
    }
}

auto clamp_count(std::int64_t count, std::size_t size, std::string_view what) -> std::size_t {
    if (count < 0) {
        throw RuntimeError(RuntimeErrorKind::AssertionFailed,
                           std::string(what) + " must not be negative, got " +
                               std::to_string(count));
    }
    return std::min(static_cast<std::size_t>(count), size);
}

auto rows_range(const Table& src, std::size_t begin, std::size_t end) -> Table {
    std::vector<Row> rows(src.rows().begin() + static_cast<std::ptrdiff_t>(begin),
                          src.rows().begin() + static_cast<std::ptrdiff_t>(end));
    return make_table_unchecked(src.schema(), std::move(rows));
}

// Running state of one aggregate within one group.
struct Accumulator {
    std::int64_t count = 0;  // rows for COUNT(), non-null values otherwise
    std::int64_t int_sum = 0;
    Decimal decimal_sum;
    Value extreme;  // MIN/MAX so far
};

}  // namespace

auto filter(const Table& src, const Expr& predicate, const RowVars& vars, Budget& budget)
    -> Table {
    std::vector<Row> rows;
    for (const auto& row : src.rows()) {
        budget.tick();
        Value keep = eval_expr(predicate, EvalScope{{&src.schema(), &row}, &vars});
        if (!keep.is_null() && keep.as_bool()) {
            rows.push_back(row);
        }
    }
    return make_table_unchecked(src.schema(), std::move(rows));
}

auto map_column(const Table& src, const std::string& column, const Expr& expr,
                const RowVars& vars, Budget& budget) -> Table {
    ExprType type = static_type(expr, src.schema(), vars);
    if (!type) {
        throw InternalError("MAP expression has no static type");
    }
    auto fields = src.schema().fields();
    fields.push_back({column, *type});
    std::vector<Row> rows;
    rows.reserve(src.row_count());
    for (const auto& row : src.rows()) {
        budget.tick();
        Row out = row;
        out.push_back(eval_expr(expr, EvalScope{{&src.schema(), &row}, &vars}));
        rows.push_back(std::move(out));
    }
    return make_table_unchecked(Schema(std::move(fields)), std::move(rows));
}

auto add_column(const Table& src, const std::string& column, const Value& value) -> Table {
    if (value.is_null()) {
        throw InternalError("ADD_COLUMN constant has no type");
    }
    auto fields = src.schema().fields();
    fields.push_back({column, *value.type()});
    std::vector<Row> rows = src.rows();
    for (auto& row : rows) {
        row.push_back(value);
    }
    return make_table_unchecked(Schema(std::move(fields)), std::move(rows));
}

auto select(const Table& src, const std::vector<std::string>& columns) -> Table {
    std::vector<std::size_t> idx;
    std::vector<Field> fields;
    for (const auto& c : columns) {
        idx.push_back(column_index(src.schema(), c));
        fields.push_back(src.schema()[idx.back()]);
    }
    std::vector<Row> rows;
    rows.reserve(src.row_count());
    for (const auto& row : src.rows()) {
        Row out;
        out.reserve(idx.size());
        for (auto i : idx) {
            out.push_back(row[i]);
        }
        rows.push_back(std::move(out));
    }
    return make_table_unchecked(Schema(std::move(fields)), std::move(rows));
}

auto distinct(const Table& src, Budget& budget) -> Table {
    std::unordered_set<Row, RowHash> seen;
    std::vector<Row> rows;
    for (const auto& row : src.rows()) {
        budget.tick();
        if (seen.insert(row).second) {
            rows.push_back(row);
        }
    }
    return make_table_unchecked(src.schema(), std::move(rows));
}

auto rename(const Table& src, const std::string& from, const std::string& to) -> Table {
    auto fields = src.schema().fields();
    fields[column_index(src.schema(), from)].name = to;
    return make_table_unchecked(Schema(std::move(fields)), src.rows());
}

auto drop(const Table& src, const std::vector<std::string>& columns) -> Table {
    std::vector<std::string> keep;
    for (const auto& f : src.schema().fields()) {
        if (std::find(columns.begin(), columns.end(), f.name) == columns.end()) {
            keep.push_back(f.name);
        }
    }
    for (const auto& c : columns) {
        column_index(src.schema(), c);
    }
    return select(src, keep);
}

auto aggregate(const Table& src, const std::vector<std::string>& group_by,
               const std::vector<AggregateCall>& computes, const RowVars& vars, Budget& budget)
    -> Table {
    const Schema& schema = src.schema();
    std::vector<std::size_t> key_idx;
    std::vector<Field> fields;
    for (const auto& g : group_by) {
        key_idx.push_back(column_index(schema, g));
        fields.push_back(schema[key_idx.back()]);
    }
    std::vector<ValueType> arg_types;
    for (const auto& c : computes) {
        ExprType arg;
        if (c.argument) {
            arg = static_type(*c.argument, schema, vars);
        }
        ValueType result = ValueType::Int;
        try {
            result = aggregate_result_type(c.fn, arg, {});
        } catch (const TypeCheckError& e) {
            throw InternalError(e.what());
        }
        arg_types.push_back(arg.value_or(ValueType::Int));
        fields.push_back({c.alias, result});
    }

    // Groups in order of first appearance.
    std::unordered_map<Row, std::size_t, RowHash> group_of;
    std::vector<Row> keys;
    std::vector<std::vector<Accumulator>> accs;
    if (group_by.empty()) {
        keys.emplace_back();
        accs.emplace_back(computes.size());
    }
    for (const auto& row : src.rows()) {
        budget.tick();
        std::size_t g = 0;
        if (!group_by.empty()) {
            Row key;
            key.reserve(key_idx.size());
            for (auto i : key_idx) {
                key.push_back(row[i]);
            }
            auto [it, inserted] = group_of.try_emplace(key, keys.size());
            if (inserted) {
                keys.push_back(std::move(key));
                accs.emplace_back(computes.size());
            }
            g = it->second;
        }
        EvalScope scope{{&schema, &row}, &vars};
        for (std::size_t c = 0; c < computes.size(); ++c) {
            Accumulator& acc = accs[g][c];
            const auto& call = computes[c];
            if (call.fn == AggregateFn::Count) {
                ++acc.count;
                continue;
            }
            Value v = eval_expr(*call.argument, scope);
            if (v.is_null()) {
                continue;
            }
            ++acc.count;
            switch (call.fn) {
                case AggregateFn::Sum:
                case AggregateFn::Avg:
                    if (v.type() == ValueType::Int && call.fn == AggregateFn::Sum) {
                        if (__builtin_add_overflow(acc.int_sum, v.as_int(), &acc.int_sum)) {
                            throw RuntimeError(RuntimeErrorKind::ConversionError,
                                               "SUM(" + call.alias + ") overflows INT");
                        }
                    } else {
                        Decimal d = v.type() == ValueType::Int ? Decimal::from_int(v.as_int())
                                                               : v.as_decimal();
                        try {
                            acc.decimal_sum = acc.decimal_sum + d;
                        } catch (const DecimalError&) {
                            throw RuntimeError(RuntimeErrorKind::ConversionError,
                                               std::string(aggregate_fn_name(call.fn)) +
                                                   " overflows DECIMAL");
                        }
                    }
                    break;
                case AggregateFn::Min:
                case AggregateFn::Max: {
                    if (acc.extreme.is_null()) {
                        acc.extreme = v;
                        break;
                    }
                    auto ord = compare_values(v, acc.extreme);
                    if ((call.fn == AggregateFn::Min && ord < 0) ||
                        (call.fn == AggregateFn::Max && ord > 0)) {
                        acc.extreme = v;
                    }
                    break;
                }
                case AggregateFn::Count:
                    break;
            }
        }
    }

    std::vector<Row> rows;
    rows.reserve(keys.size());
    for (std::size_t g = 0; g < keys.size(); ++g) {
        Row out = keys[g];
        for (std::size_t c = 0; c < computes.size(); ++c) {
            const Accumulator& acc = accs[g][c];
            switch (computes[c].fn) {
                case AggregateFn::Count:
                    out.emplace_back(acc.count);
                    break;
                case AggregateFn::Sum:
                    if (acc.count == 0) {
                        out.emplace_back();
                    } else if (arg_types[c] == ValueType::Int) {
                        out.emplace_back(acc.int_sum);
                    } else {
                        out.emplace_back(acc.decimal_sum);
                    }
                    break;
                case AggregateFn::Avg:
                    if (acc.count == 0) {
                        out.emplace_back();
                    } else {
                        try {
                            int scale = Decimal::division_scale(acc.decimal_sum.scale(), 0);
                            out.emplace_back(Decimal::divide(
                                acc.decimal_sum, Decimal::from_int(acc.count), scale));
                        } catch (const DecimalError&) {
                            throw RuntimeError(RuntimeErrorKind::ConversionError,
                                               "AVG(" + computes[c].alias + ") overflows DECIMAL");
                        }
                    }
                    break;
                case AggregateFn::Min:
                case AggregateFn::Max:
                    out.push_back(acc.extreme);
                    break;
            }
        }
        rows.push_back(std::move(out));
    }
    return make_table_unchecked(Schema(std::move(fields)), std::move(rows));
}

auto sort(const Table& src, const std::string& column, SortDirection direction) -> Table {
    std::size_t idx = column_index(src.schema(), column);
    std::vector<Row> rows = src.rows();
    std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
        const Value& x = a[idx];
        const Value& y = b[idx];
        // Nulls last in both directions.
        if (x.is_null() || y.is_null()) {
            return !x.is_null() && y.is_null();
        }
        auto ord = compare_values(x, y);
        return direction == SortDirection::Asc ? ord < 0 : ord > 0;
    });
    return make_table_unchecked(src.schema(), std::move(rows));
}

auto limit(const Table& src, std::int64_t count) -> Table {
    return rows_range(src, 0, clamp_count(count, src.row_count(), "LIMIT count"));
}

auto skip(const Table& src, std::int64_t count) -> Table {
    return rows_range(src, clamp_count(count, src.row_count(), "SKIP count"), src.row_count());
}

auto slice(const Table& src, std::int64_t from, std::int64_t to) -> Table {
    std::size_t begin = clamp_count(from, src.row_count(), "SLICE start");
    std::size_t end = clamp_count(to, src.row_count(), "SLICE end");
    if (from > to) {
        throw RuntimeError(RuntimeErrorKind::AssertionFailed,
                           "SLICE start " + std::to_string(from) + " exceeds end " +
                               std::to_string(to));
    }
    return rows_range(src, begin, end);
}

auto join(const Table& left, const Table& right, const std::string& left_key,
          const std::string& right_key, JoinKind kind, Budget& budget) -> Table {
    std::size_t lk = column_index(left.schema(), left_key);
    std::size_t rk = column_index(right.schema(), right_key);

    auto fields = left.schema().fields();
    for (std::size_t i = 0; i < right.column_count(); ++i) {
        if (i != rk) {
            fields.push_back(right.schema()[i]);
        }
    }

    // Value::hash is consistent with INT/DECIMAL cross-equality.
    std::unordered_map<Value, std::vector<std::size_t>> index;
    for (std::size_t r = 0; r < right.row_count(); ++r) {
        const Value& key = right.at(r, rk);
        if (!key.is_null()) {
            index[key].push_back(r);
        }
    }

    std::vector<Row> rows;
    for (const auto& lrow : left.rows()) {
        budget.tick();
        const std::vector<std::size_t>* matches = nullptr;
        if (!lrow[lk].is_null()) {
            auto it = index.find(lrow[lk]);
            if (it != index.end()) {
                matches = &it->second;
            }
        }
        if (matches == nullptr) {
            if (kind == JoinKind::Left) {
                Row out = lrow;
                out.resize(fields.size());
                rows.push_back(std::move(out));
            }
            continue;
        }
        for (std::size_t r : *matches) {
            budget.tick();
            Row out = lrow;
            const Row& rrow = right.rows()[r];
            for (std::size_t i = 0; i < rrow.size(); ++i) {
                if (i != rk) {
                    out.push_back(rrow[i]);
                }
            }
            rows.push_back(std::move(out));
        }
    }
    return make_table_unchecked(Schema(std::move(fields)), std::move(rows));
}

auto union_all(const Table& left, const Table& right) -> Table {
    if (left.schema() != right.schema()) {
        throw InternalError("UNION of differing schemas");
    }
    std::vector<Row> rows = left.rows();
    rows.insert(rows.end(), right.rows().begin(), right.rows().end());
    return make_table_unchecked(left.schema(), std::move(rows));
}

}  // namespace anka::ops
