#include <anka/interpreter.hpp>

#include <algorithm>
#include <charconv>
#include <limits>

namespace anka {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void conversion_error(std::string message) {
    throw RuntimeError(RuntimeErrorKind::ConversionError, std::move(message));
}

auto as_decimal(const Value& v) -> Decimal {
    return v.type() == ValueType::Int ? Decimal::from_int(v.as_int()) : v.as_decimal();
}

auto require(const Value& v, ValueType type, std::string_view what) -> const Value& {
    if (v.type() != type) {
        throw InternalError(std::string(what) + ": expected " + std::string(type_name(type)) +
                            ", got " + (v.is_null() ? "NULL" : std::string(type_name(*v.type()))));
    }
    return v;
}

auto require_numeric(const Value& v, std::string_view what) -> void {
    if (!v.type() || !is_numeric(*v.type())) {
        throw InternalError(std::string(what) + ": expected a number");
    }
}

auto int_arith(BinaryOp op, std::int64_t a, std::int64_t b) -> Value {
    std::int64_t out = 0;
    bool overflow = false;
    switch (op) {
        case BinaryOp::Add:
            overflow = __builtin_add_overflow(a, b, &out);
            break;
        case BinaryOp::Sub:
            overflow = __builtin_sub_overflow(a, b, &out);
            break;
        case BinaryOp::Mul:
            overflow = __builtin_mul_overflow(a, b, &out);
            break;
        case BinaryOp::Div:
            if (b == 0) {
                throw RuntimeError(RuntimeErrorKind::DivisionByZero, "division by zero");
            }
            if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
                overflow = true;
            } else {
                out = a / b;  // truncates toward zero
            }
            break;
        default:
            break;
    }
    if (overflow) {
        conversion_error("INT overflow in '" + std::string(binary_op_symbol(op)) + "'");
    }
    return Value(out);
}

auto decimal_arith(BinaryOp op, const Decimal& a, const Decimal& b) -> Value {
    try {
        switch (op) {
            case BinaryOp::Add:
                return Value(a + b);
            case BinaryOp::Sub:
                return Value(a - b);
            case BinaryOp::Mul:
                return Value(a * b);
            case BinaryOp::Div:
                if (b.is_zero()) {
                    throw RuntimeError(RuntimeErrorKind::DivisionByZero, "division by zero");
                }
                return Value(
                    Decimal::divide(a, b, Decimal::division_scale(a.scale(), b.scale())));
            default:
                break;
        }
    } catch (const DecimalError& e) {
        conversion_error(e.what());
    }
    throw InternalError("not an arithmetic operator");
}

auto compare_op(BinaryOp op, const Value& l, const Value& r) -> Value {
    auto ord = compare_values(l, r);
    if (ord == std::partial_ordering::unordered) {
        throw InternalError("incomparable values " + l.to_string() + " and " + r.to_string());
    }
    switch (op) {
        case BinaryOp::Eq:
            return Value(ord == 0);
        case BinaryOp::Ne:
            return Value(ord != 0);
        case BinaryOp::Lt:
            return Value(ord < 0);
        case BinaryOp::Le:
            return Value(ord <= 0);
        case BinaryOp::Gt:
            return Value(ord > 0);
        case BinaryOp::Ge:
            return Value(ord >= 0);
        default:
            throw InternalError("not a comparison operator");
    }
}

// ── string helpers (code-point aware) ──────────────────────────────────────

auto code_point_starts(const std::string& s) -> std::vector<std::size_t> {
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
            starts.push_back(i);
        }
    }
    return starts;
}

auto ascii_transform(std::string s, bool upper) -> std::string {
    for (char& ch : s) {
        if (upper && ch >= 'a' && ch <= 'z') {
            ch = static_cast<char>(ch - 'a' + 'A');
        } else if (!upper && ch >= 'A' && ch <= 'Z') {
            ch = static_cast<char>(ch - 'A' + 'a');
        }
    }
    return s;
}

auto trim(const std::string& s) -> std::string {
    auto is_space = [](char ch) {
        return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v';
    };
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) {
        ++b;
    }
    while (e > b && is_space(s[e - 1])) {
        --e;
    }
    return s.substr(b, e - b);
}

auto substring(const std::string& s, std::int64_t start, std::int64_t length) -> std::string {
    if (start < 0 || length < 0) {
        conversion_error("SUBSTRING start and length must be non-negative");
    }
    auto starts = code_point_starts(s);
    auto count = static_cast<std::int64_t>(starts.size());
    if (start >= count) {
        return "";
    }
    std::int64_t end = length > count - start ? count : start + length;
    std::size_t byte_begin = starts[static_cast<std::size_t>(start)];
    std::size_t byte_end = end >= count ? s.size() : starts[static_cast<std::size_t>(end)];
    return s.substr(byte_begin, byte_end - byte_begin);
}

auto replace_all(std::string s, const std::string& from, const std::string& to) -> std::string {
    if (from.empty()) {
        return s;
    }
    std::string out;
    std::size_t pos = 0;
    while (true) {
        std::size_t hit = s.find(from, pos);
        if (hit == std::string::npos) {
            out.append(s, pos, std::string::npos);
            break;
        }
        out.append(s, pos, hit - pos);
        out += to;
        pos = hit + from.size();
    }
    return out;
}

auto to_int(const Value& v) -> Value {
    switch (*v.type()) {
        case ValueType::Int:
            return v;
        case ValueType::Decimal:
            try {
                return Value(v.as_decimal().to_int64());
            } catch (const DecimalError& e) {
                conversion_error(e.what());
            }
        case ValueType::String: {
            std::string text = trim(v.as_string());
            const char* begin = text.data();
            const char* end = text.data() + text.size();
            if (begin != end && *begin == '+') {
                ++begin;
            }
            std::int64_t out = 0;
            auto [ptr, ec] = std::from_chars(begin, end, out);
            if (begin == end || ec != std::errc{} || ptr != end) {
                conversion_error("TO_INT cannot convert \"" + v.as_string() + "\"");
            }
            return Value(out);
        }
        default:
            throw InternalError("TO_INT: unsupported argument type");
    }
}

auto to_decimal(const Value& v) -> Value {
    switch (*v.type()) {
        case ValueType::Int:
            return Value(Decimal::from_int(v.as_int()));
        case ValueType::Decimal:
            return v;
        case ValueType::String:
            try {
                return Value(Decimal::parse(trim(v.as_string())));
            } catch (const DecimalError&) {
                conversion_error("TO_DECIMAL cannot convert \"" + v.as_string() + "\"");
            }
        default:
            throw InternalError("TO_DECIMAL: unsupported argument type");
    }
}

auto date_part(const Value& v, char part) -> Value {
    Date d = v.type() == ValueType::DateTime ? v.as_datetime().date() : v.as_date();
    switch (part) {
        case 'Y':
            return Value(static_cast<std::int64_t>(d.year()));
        case 'M':
            return Value(static_cast<std::int64_t>(d.month()));
        default:
            return Value(static_cast<std::int64_t>(d.day()));
    }
}

auto call_builtin(const std::string& fn, const std::vector<Value>& args) -> Value {
    for (const auto& a : args) {
        if (a.is_null()) {
            return Value::null();
        }
    }
    auto arity = [&](std::size_t n) {
        if (args.size() != n) {
            throw InternalError(fn + ": wrong number of arguments");
        }
    };
    if (fn == "CONCAT") {
        std::string out;
        for (const auto& a : args) {
            out += require(a, ValueType::String, fn).as_string();
        }
        return Value(std::move(out));
    }
    if (fn == "UPPER" || fn == "LOWER") {
        arity(1);
        return Value(ascii_transform(require(args[0], ValueType::String, fn).as_string(),
                                     fn == "UPPER"));
    }
    if (fn == "TRIM") {
        arity(1);
        return Value(trim(require(args[0], ValueType::String, fn).as_string()));
    }
    if (fn == "LENGTH") {
        arity(1);
        const auto& s = require(args[0], ValueType::String, fn).as_string();
        return Value(static_cast<std::int64_t>(code_point_starts(s).size()));
    }
    if (fn == "SUBSTRING") {
        arity(3);
        return Value(substring(require(args[0], ValueType::String, fn).as_string(),
                               require(args[1], ValueType::Int, fn).as_int(),
                               require(args[2], ValueType::Int, fn).as_int()));
    }
    if (fn == "REPLACE") {
        arity(3);
        return Value(replace_all(require(args[0], ValueType::String, fn).as_string(),
                                 require(args[1], ValueType::String, fn).as_string(),
                                 require(args[2], ValueType::String, fn).as_string()));
    }
    if (fn == "TO_STRING") {
        arity(1);
        return Value(args[0].to_string());
    }
    if (fn == "TO_INT") {
        arity(1);
        return to_int(args[0]);
    }
    if (fn == "TO_DECIMAL") {
        arity(1);
        return to_decimal(args[0]);
    }
    if (fn == "YEAR" || fn == "MONTH" || fn == "DAY") {
        arity(1);
        if (args[0].type() != ValueType::Date && args[0].type() != ValueType::DateTime) {
            throw InternalError(fn + ": expected DATE or DATETIME");
        }
        return date_part(args[0], fn[0]);
    }
    throw InternalError("unknown function '" + fn + "'");
}

auto lookup_column(const RowRef& ref, const std::string& name) -> const Value& {
    auto idx = ref.schema->index_of(name);
    if (!idx) {
        throw InternalError("unknown column '" + name + "' at runtime");
    }
    return (*ref.row)[*idx];
}

}  // namespace

auto eval_expr(const Expr& expr, const EvalScope& scope) -> Value {
    return std::visit(
        overloaded{
            [&](const LiteralExpr& lit) -> Value { return lit.value; },
            [&](const ColumnExpr& col) -> Value {
                if (col.qualifier) {
                    if (scope.row_vars == nullptr) {
                        throw InternalError("row variable '" + *col.qualifier + "' not in scope");
                    }
                    auto it = scope.row_vars->find(*col.qualifier);
                    if (it == scope.row_vars->end()) {
                        throw InternalError("row variable '" + *col.qualifier + "' not in scope");
                    }
                    return lookup_column(it->second, col.name);
                }
                if (scope.row.row == nullptr) {
                    throw InternalError("column '" + col.name + "' outside a row context");
                }
                return lookup_column(scope.row, col.name);
            },
            [&](const UnaryExpr& u) -> Value {
                Value v = eval_expr(*u.operand, scope);
                if (v.is_null()) {
                    return v;
                }
                if (u.op == UnaryOp::Not) {
                    return Value(!require(v, ValueType::Bool, "NOT").as_bool());
                }
                require_numeric(v, "unary '-'");
                if (v.type() == ValueType::Int) {
                    if (v.as_int() == std::numeric_limits<std::int64_t>::min()) {
                        conversion_error("INT overflow in unary '-'");
                    }
                    return Value(-v.as_int());
                }
                return Value(-v.as_decimal());
            },
            [&](const BinaryExpr& b) -> Value {
                if (b.op == BinaryOp::And || b.op == BinaryOp::Or) {
                    const bool short_value = b.op == BinaryOp::Or;
                    Value l = eval_expr(*b.lhs, scope);
                    if (!l.is_null() && require(l, ValueType::Bool, "AND/OR").as_bool() == short_value) {
                        return Value(short_value);
                    }
                    Value r = eval_expr(*b.rhs, scope);
                    if (!r.is_null() && require(r, ValueType::Bool, "AND/OR").as_bool() == short_value) {
                        return Value(short_value);
                    }
                    if (l.is_null() || r.is_null()) {
                        return Value::null();
                    }
                    return Value(!short_value);
                }
                Value l = eval_expr(*b.lhs, scope);
                Value r = eval_expr(*b.rhs, scope);
                if (l.is_null() || r.is_null()) {
                    return Value::null();
                }
                switch (b.op) {
                    case BinaryOp::Add:
                    case BinaryOp::Sub:
                    case BinaryOp::Mul:
                    case BinaryOp::Div:
                        require_numeric(l, binary_op_symbol(b.op));
                        require_numeric(r, binary_op_symbol(b.op));
                        if (l.type() == ValueType::Int && r.type() == ValueType::Int) {
                            return int_arith(b.op, l.as_int(), r.as_int());
                        }
                        return decimal_arith(b.op, as_decimal(l), as_decimal(r));
                    default:
                        return compare_op(b.op, l, r);
                }
            },
            [&](const CallExpr& c) -> Value {
                std::vector<Value> args;
                args.reserve(c.args.size());
                for (const auto& a : c.args) {
                    args.push_back(eval_expr(*a, scope));
                }
                return call_builtin(c.function, args);
            },
            [&](const GroupExpr& g) -> Value { return eval_expr(*g.inner, scope); },
        },
        expr.node);
}

}  // namespace anka
