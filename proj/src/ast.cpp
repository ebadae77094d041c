#include <anka/syntax.hpp>

#include <array>

namespace anka {

using json = nlohmann::ordered_json;

auto to_string(const SourceLocation& loc) -> std::string {
    return std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

auto binary_op_symbol(BinaryOp op) -> std::string_view {
    switch (op) {
        case BinaryOp::Add:
            return "+";
        case BinaryOp::Sub:
            return "-";
        case BinaryOp::Mul:
            return "*";
        case BinaryOp::Div:
            return "/";
        case BinaryOp::Eq:
            return "==";
        case BinaryOp::Ne:
            return "!=";
        case BinaryOp::Lt:
            return "<";
        case BinaryOp::Le:
            return "<=";
        case BinaryOp::Gt:
            return ">";
        case BinaryOp::Ge:
            return ">=";
        case BinaryOp::And:
            return "AND";
        case BinaryOp::Or:
            return "OR";
    }
    return "?";
}

namespace {

constexpr std::array<std::string_view, 5> kAggregateNames = {"COUNT", "SUM", "AVG", "MIN",
                                                             "MAX"};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

auto format_name(DataFormat f) -> std::string_view { return f == DataFormat::Json ? "JSON" : "CSV"; }

auto quote(std::string_view text) -> std::string {
    std::string out = "\"";
    for (char ch : text) {
        switch (ch) {
            case '"':
                out += "\\\"";
                break;
            case '\\':
                out += "\\\\";
                break;
            case '\n':
                out += "\\n";
                break;
            case '\t':
                out += "\\t";
                break;
            default:
                out.push_back(ch);
        }
    }
    out.push_back('"');
    return out;
}

auto join_names(const std::vector<Name>& names) -> std::string {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += names[i].text;
    }
    return out;
}

// ── canonical printer ──────────────────────────────────────────────────────

class Printer {
public:
    auto pipeline(const Pipeline& p) -> std::string {
        out_ = "PIPELINE " + p.name.text + ":\n";
        for (const auto& in : p.inputs) {
            out_ += "  INPUT " + in.name.text + ": " + in.schema.to_string() + "\n";
        }
        for (const auto& step : p.steps) {
            out_ += "\n  STEP " + step.name.text + ":\n";
            block(step.body, 2);
        }
        out_ += "\n  OUTPUT " + p.output.text + "\n";
        return std::move(out_);
    }

private:
    void line(int depth, const std::string& text) {
        out_ += std::string(static_cast<std::size_t>(depth) * 2, ' ') + text + "\n";
    }

    void block(const Block& body, int depth) {
        for (const auto& stmt : body) {
            statement(stmt, depth);
        }
    }

    void statement(const Statement& stmt, int depth) {
        std::visit(
            overloaded{
                [&](const FilterStmt& s) {
                    line(depth, "FILTER " + s.source.text + " WHERE " + format_expr(*s.predicate) +
                                    " INTO " + s.target.text);
                },
                [&](const SelectStmt& s) {
                    line(depth, "SELECT " + s.source.text + " COLUMNS " + join_names(s.columns) +
                                    " INTO " + s.target.text);
                },
                [&](const DistinctStmt& s) {
                    line(depth, "DISTINCT " + s.source.text + " INTO " + s.target.text);
                },
                [&](const MapStmt& s) {
                    line(depth, "MAP " + s.source.text + " WITH " + s.column.text + " => " +
                                    format_expr(*s.expr) + " INTO " + s.target.text);
                },
                [&](const RenameStmt& s) {
                    line(depth, "RENAME " + s.source.text + " COLUMN " + s.from.text + " TO " +
                                    s.to.text + " INTO " + s.target.text);
                },
                [&](const DropStmt& s) {
                    line(depth, "DROP " + s.source.text + " COLUMNS " + join_names(s.columns) +
                                    " INTO " + s.target.text);
                },
                [&](const AddColumnStmt& s) {
                    line(depth, "ADD_COLUMN " + s.source.text + " WITH " + s.column.text +
                                    " => " + format_expr(*s.value) + " INTO " + s.target.text);
                },
                [&](const AggregateStmt& s) {
                    std::string text = "AGGREGATE " + s.source.text;
                    if (!s.group_by.empty()) {
                        text += " GROUP_BY " + join_names(s.group_by);
                    }
                    text += " COMPUTE ";
                    for (std::size_t i = 0; i < s.computes.size(); ++i) {
                        const auto& c = s.computes[i];
                        if (i > 0) {
                            text += ", ";
                        }
                        text += std::string(aggregate_fn_name(c.fn)) + "(" +
                                (c.argument ? format_expr(*c.argument) : "") + ") AS " +
                                c.alias.text;
                    }
                    line(depth, text + " INTO " + s.target.text);
                },
                [&](const SortStmt& s) {
                    line(depth, "SORT " + s.source.text + " BY " + s.column.text +
                                    (s.direction == SortDirection::Asc ? " ASC" : " DESC") +
                                    " INTO " + s.target.text);
                },
                [&](const LimitStmt& s) {
                    line(depth, "LIMIT " + s.source.text + " " + format_expr(*s.count) + " INTO " +
                                    s.target.text);
                },
                [&](const SkipStmt& s) {
                    line(depth, "SKIP " + s.source.text + " " + format_expr(*s.count) + " INTO " +
                                    s.target.text);
                },
                [&](const SliceStmt& s) {
                    line(depth, "SLICE " + s.source.text + " FROM " + format_expr(*s.from) +
                                    " TO " + format_expr(*s.to) + " INTO " + s.target.text);
                },
                [&](const JoinStmt& s) {
                    line(depth, std::string(s.kind == JoinKind::Inner ? "JOIN " : "LEFT_JOIN ") +
                                    s.left.text + " WITH " + s.right.text + " ON " +
                                    s.left_key.text + " == " + s.right_key.text + " INTO " +
                                    s.target.text);
                },
                [&](const UnionStmt& s) {
                    line(depth, "UNION " + s.left.text + " WITH " + s.right.text + " INTO " +
                                    s.target.text);
                },
                [&](const ReadStmt& s) {
                    line(depth, "READ " + quote(s.path) + " AS " + std::string(format_name(s.format)) +
                                    " " + s.schema.to_string() + " INTO " + s.target.text);
                },
                [&](const WriteStmt& s) {
                    line(depth, "WRITE " + s.source.text + " TO " + quote(s.path) + " AS " +
                                    std::string(format_name(s.format)));
                },
                [&](const FetchStmt& s) {
                    line(depth, "FETCH " + quote(s.url) + " " + s.schema.to_string() + " INTO " +
                                    s.target.text);
                },
                [&](const PostStmt& s) {
                    line(depth, "POST " + s.source.text + " TO " + quote(s.url));
                },
                [&](const IfStmt& s) {
                    line(depth, "IF " + format_expr(*s.condition) + " THEN");
                    block(s.then_body, depth + 1);
                    if (s.else_body) {
                        line(depth, "ELSE");
                        block(*s.else_body, depth + 1);
                    }
                    line(depth, "END_IF");
                },
                [&](const ForEachStmt& s) {
                    line(depth, "FOR_EACH " + s.row_var.text + " IN " + s.source.text + " DO");
                    block(s.body, depth + 1);
                    line(depth, "END_FOR");
                },
                [&](const WhileStmt& s) {
                    line(depth, "WHILE " + format_expr(*s.condition) + " DO");
                    block(s.body, depth + 1);
                    line(depth, "END_WHILE");
                },
                [&](const TryStmt& s) {
                    line(depth, "TRY");
                    block(s.body, depth + 1);
                    line(depth, "ON_ERROR");
                    block(s.handler, depth + 1);
                    line(depth, "END_TRY");
                },
            },
            stmt.node);
    }

    std::string out_;
};

// ── JSON dump ──────────────────────────────────────────────────────────────

class JsonWriter {
public:
    explicit JsonWriter(bool with_locations) : with_locations_(with_locations) {}

    auto location(json& node, const SourceLocation& loc) const -> void {
        if (with_locations_) {
            node["location"] = {{"line", loc.line}, {"column", loc.column}, {"offset", loc.offset}};
        }
    }

    auto name(const Name& n) const -> json {
        if (!with_locations_) {
            return n.text;
        }
        json out = {{"name", n.text}};
        location(out, n.location);
        return out;
    }

    auto names(const std::vector<Name>& ns) const -> json {
        json arr = json::array();
        for (const auto& n : ns) {
            arr.push_back(name(n));
        }
        return arr;
    }

    static auto schema(const Schema& s) -> json {
        json arr = json::array();
        for (const auto& f : s.fields()) {
            arr.push_back({{"name", f.name}, {"type", type_name(f.type)}});
        }
        return arr;
    }

    auto expr(const Expr& e) const -> json {
        json out;
        std::visit(
            overloaded{
                [&](const LiteralExpr& lit) {
                    out["kind"] = "literal";
                    auto type = lit.value.type();
                    out["type"] = type ? json(type_name(*type)) : json("NULL");
                    if (lit.value.is_null()) {
                        out["value"] = nullptr;
                    } else {
                        out["value"] = lit.value.to_string();
                    }
                },
                [&](const ColumnExpr& col) {
                    out["kind"] = "column";
                    if (col.qualifier) {
                        out["qualifier"] = *col.qualifier;
                    }
                    out["name"] = col.name;
                },
                [&](const UnaryExpr& u) {
                    out["kind"] = "unary";
                    out["op"] = u.op == UnaryOp::Neg ? "-" : "NOT";
                    out["operand"] = expr(*u.operand);
                },
                [&](const BinaryExpr& b) {
                    out["kind"] = "binary";
                    out["op"] = binary_op_symbol(b.op);
                    out["lhs"] = expr(*b.lhs);
                    out["rhs"] = expr(*b.rhs);
                },
                [&](const CallExpr& c) {
                    out["kind"] = "call";
                    out["function"] = c.function;
                    json args = json::array();
                    for (const auto& a : c.args) {
                        args.push_back(expr(*a));
                    }
                    out["args"] = std::move(args);
                },
                [&](const GroupExpr& g) {
                    out["kind"] = "group";
                    out["inner"] = expr(*g.inner);
                },
            },
            e.node);
        location(out, e.location);
        return out;
    }

    auto block(const Block& body) const -> json {
        json arr = json::array();
        for (const auto& s : body) {
            arr.push_back(statement(s));
        }
        return arr;
    }

    auto statement(const Statement& stmt) const -> json {
        json out;
        out["kind"] = statement_keyword(stmt);
        std::visit(
            overloaded{
                [&](const FilterStmt& s) {
                    out["source"] = name(s.source);
                    out["predicate"] = expr(*s.predicate);
                    out["into"] = name(s.target);
                },
                [&](const SelectStmt& s) {
                    out["source"] = name(s.source);
                    out["columns"] = names(s.columns);
                    out["into"] = name(s.target);
                },
                [&](const DistinctStmt& s) {
                    out["source"] = name(s.source);
                    out["into"] = name(s.target);
                },
                [&](const MapStmt& s) {
                    out["source"] = name(s.source);
                    out["column"] = name(s.column);
                    out["expr"] = expr(*s.expr);
                    out["into"] = name(s.target);
                },
                [&](const RenameStmt& s) {
                    out["source"] = name(s.source);
                    out["from"] = name(s.from);
                    out["to"] = name(s.to);
                    out["into"] = name(s.target);
                },
                [&](const DropStmt& s) {
                    out["source"] = name(s.source);
                    out["columns"] = names(s.columns);
                    out["into"] = name(s.target);
                },
                [&](const AddColumnStmt& s) {
                    out["source"] = name(s.source);
                    out["column"] = name(s.column);
                    out["value"] = expr(*s.value);
                    out["into"] = name(s.target);
                },
                [&](const AggregateStmt& s) {
                    out["source"] = name(s.source);
                    out["group_by"] = names(s.group_by);
                    json computes = json::array();
                    for (const auto& c : s.computes) {
                        json item = {{"function", aggregate_fn_name(c.fn)}};
                        item["argument"] = c.argument ? expr(*c.argument) : json(nullptr);
                        item["alias"] = name(c.alias);
                        location(item, c.location);
                        computes.push_back(std::move(item));
                    }
                    out["compute"] = std::move(computes);
                    out["into"] = name(s.target);
                },
                [&](const SortStmt& s) {
                    out["source"] = name(s.source);
                    out["column"] = name(s.column);
                    out["direction"] = s.direction == SortDirection::Asc ? "ASC" : "DESC";
                    out["into"] = name(s.target);
                },
                [&](const LimitStmt& s) {
                    out["source"] = name(s.source);
                    out["count"] = expr(*s.count);
                    out["into"] = name(s.target);
                },
                [&](const SkipStmt& s) {
                    out["source"] = name(s.source);
                    out["count"] = expr(*s.count);
                    out["into"] = name(s.target);
                },
                [&](const SliceStmt& s) {
                    out["source"] = name(s.source);
                    out["from"] = expr(*s.from);
                    out["to"] = expr(*s.to);
                    out["into"] = name(s.target);
                },
                [&](const JoinStmt& s) {
                    out["left"] = name(s.left);
                    out["right"] = name(s.right);
                    out["left_key"] = name(s.left_key);
                    out["right_key"] = name(s.right_key);
                    out["into"] = name(s.target);
                },
                [&](const UnionStmt& s) {
                    out["left"] = name(s.left);
                    out["right"] = name(s.right);
                    out["into"] = name(s.target);
                },
                [&](const ReadStmt& s) {
                    out["path"] = s.path;
                    out["format"] = format_name(s.format);
                    out["schema"] = schema(s.schema);
                    out["into"] = name(s.target);
                },
                [&](const WriteStmt& s) {
                    out["source"] = name(s.source);
                    out["path"] = s.path;
                    out["format"] = format_name(s.format);
                },
                [&](const FetchStmt& s) {
                    out["url"] = s.url;
                    out["schema"] = schema(s.schema);
                    out["into"] = name(s.target);
                },
                [&](const PostStmt& s) {
                    out["source"] = name(s.source);
                    out["url"] = s.url;
                },
                [&](const IfStmt& s) {
                    out["condition"] = expr(*s.condition);
                    out["then"] = block(s.then_body);
                    out["else"] = s.else_body ? block(*s.else_body) : json(nullptr);
                },
                [&](const ForEachStmt& s) {
                    out["row"] = name(s.row_var);
                    out["source"] = name(s.source);
                    out["body"] = block(s.body);
                },
                [&](const WhileStmt& s) {
                    out["condition"] = expr(*s.condition);
                    out["body"] = block(s.body);
                },
                [&](const TryStmt& s) {
                    out["body"] = block(s.body);
                    out["on_error"] = block(s.handler);
                },
            },
            stmt.node);
        location(out, stmt.location);
        return out;
    }

    auto pipeline(const Pipeline& p) const -> json {
        json out;
        out["pipeline"] = name(p.name);
        json inputs = json::array();
        for (const auto& in : p.inputs) {
            json item = {{"name", name(in.name)}, {"schema", schema(in.schema)}};
            location(item, in.location);
            inputs.push_back(std::move(item));
        }
        out["inputs"] = std::move(inputs);
        json steps = json::array();
        for (const auto& step : p.steps) {
            json item = {{"name", name(step.name)}, {"body", block(step.body)}};
            location(item, step.location);
            steps.push_back(std::move(item));
        }
        out["steps"] = std::move(steps);
        out["output"] = name(p.output);
        location(out, p.location);
        return out;
    }

private:
    bool with_locations_;
};

}  // namespace

auto aggregate_fn_name(AggregateFn fn) -> std::string_view {
    return kAggregateNames[static_cast<std::size_t>(fn)];
}

auto parse_aggregate_fn(std::string_view name) -> std::optional<AggregateFn> {
    for (std::size_t i = 0; i < kAggregateNames.size(); ++i) {
        if (kAggregateNames[i] == name) {
            return static_cast<AggregateFn>(i);
        }
    }
    return std::nullopt;
}

auto statement_keyword(const Statement& stmt) -> std::string_view {
    return std::visit(
        overloaded{
            [](const FilterStmt&) -> std::string_view { return "FILTER"; },
            [](const SelectStmt&) -> std::string_view { return "SELECT"; },
            [](const DistinctStmt&) -> std::string_view { return "DISTINCT"; },
            [](const MapStmt&) -> std::string_view { return "MAP"; },
            [](const RenameStmt&) -> std::string_view { return "RENAME"; },
            [](const DropStmt&) -> std::string_view { return "DROP"; },
            [](const AddColumnStmt&) -> std::string_view { return "ADD_COLUMN"; },
            [](const AggregateStmt&) -> std::string_view { return "AGGREGATE"; },
            [](const SortStmt&) -> std::string_view { return "SORT"; },
            [](const LimitStmt&) -> std::string_view { return "LIMIT"; },
            [](const SkipStmt&) -> std::string_view { return "SKIP"; },
            [](const SliceStmt&) -> std::string_view { return "SLICE"; },
            [](const JoinStmt& s) -> std::string_view {
                return s.kind == JoinKind::Inner ? "JOIN" : "LEFT_JOIN";
            },
            [](const UnionStmt&) -> std::string_view { return "UNION"; },
            [](const ReadStmt&) -> std::string_view { return "READ"; },
            [](const WriteStmt&) -> std::string_view { return "WRITE"; },
            [](const FetchStmt&) -> std::string_view { return "FETCH"; },
            [](const PostStmt&) -> std::string_view { return "POST"; },
            [](const IfStmt&) -> std::string_view { return "IF"; },
            [](const ForEachStmt&) -> std::string_view { return "FOR_EACH"; },
            [](const WhileStmt&) -> std::string_view { return "WHILE"; },
            [](const TryStmt&) -> std::string_view { return "TRY"; },
        },
        stmt.node);
}

auto statement_target(const Statement& stmt) -> const Name* {
    return std::visit(
        [](const auto& s) -> const Name* {
            if constexpr (requires { s.target; }) {
                return &s.target;
            } else {
                return nullptr;
            }
        },
        stmt.node);
}

auto format_literal(const Value& value) -> std::string {
    if (value.is_null()) {
        return "NULL";
    }
    switch (*value.type()) {
        case ValueType::String:
            return quote(value.as_string());
        case ValueType::Bool:
            return value.as_bool() ? "TRUE" : "FALSE";
        case ValueType::Date:
            return "DATE " + quote(value.to_string());
        case ValueType::DateTime:
            return "DATETIME " + quote(value.to_string());
        default:
            return value.to_string();
    }
}

auto format_expr(const Expr& expr) -> std::string {
    return std::visit(
        overloaded{
            [](const LiteralExpr& lit) { return format_literal(lit.value); },
            [](const ColumnExpr& col) {
                return col.qualifier ? *col.qualifier + "." + col.name : col.name;
            },
            [](const UnaryExpr& u) {
                return u.op == UnaryOp::Neg ? "-" + format_expr(*u.operand)
                                            : "NOT " + format_expr(*u.operand);
            },
            [](const BinaryExpr& b) {
                return format_expr(*b.lhs) + " " + std::string(binary_op_symbol(b.op)) + " " +
                       format_expr(*b.rhs);
            },
            [](const CallExpr& c) {
                std::string out = c.function + "(";
                for (std::size_t i = 0; i < c.args.size(); ++i) {
                    if (i > 0) {
                        out += ", ";
                    }
                    out += format_expr(*c.args[i]);
                }
                return out + ")";
            },
            [](const GroupExpr& g) { return "(" + format_expr(*g.inner) + ")"; },
        },
        expr.node);
}

auto format_pipeline(const Pipeline& pipeline) -> std::string {
    return Printer().pipeline(pipeline);
}

auto pipeline_to_json(const Pipeline& pipeline, bool with_locations) -> json {
    return JsonWriter(with_locations).pipeline(pipeline);
}

auto expr_to_json(const Expr& expr, bool with_locations) -> json {
    return JsonWriter(with_locations).expr(expr);
}

auto structurally_equal(const Pipeline& a, const Pipeline& b) -> bool {
    return pipeline_to_json(a, false) == pipeline_to_json(b, false);
}

}  // namespace anka
