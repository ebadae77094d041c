#include "syntax_detail.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <unordered_map>

namespace anka {

namespace {

const std::vector<std::string_view> kStatementKeywords = {
    "FILTER", "SELECT", "DISTINCT", "MAP",   "RENAME", "DROP",     "ADD_COLUMN", "AGGREGATE",
    "SORT",   "LIMIT",  "SKIP",     "SLICE", "JOIN",   "LEFT_JOIN", "UNION",     "READ",
    "WRITE",  "FETCH",  "POST",     "IF",    "FOR_EACH", "WHILE",   "TRY",
};

auto describe(const Token& tok) -> std::string {
    switch (tok.kind) {
        case TokenKind::End:
            return "end of input";
        case TokenKind::Keyword:
            return "keyword '" + tok.lexeme + "'";
        case TokenKind::Identifier:
            return "identifier '" + tok.lexeme + "'";
        case TokenKind::StringLiteral:
            return "string literal";
        case TokenKind::IntLiteral:
        case TokenKind::DecimalLiteral:
            return "number '" + tok.lexeme + "'";
        case TokenKind::Symbol:
            return "'" + tok.lexeme + "'";
    }
    return "token";
}

class Parser {
public:
    explicit Parser(std::string_view source) : tokens_(detail::tokenize_with_end(source)) {}

    auto pipeline() -> Pipeline {
        Pipeline p;
        p.location = peek().location;
        expect_keyword("PIPELINE");
        p.name = identifier("pipeline name");
        expect_symbol(":");
        while (at_keyword("INPUT")) {
            p.inputs.push_back(input());
        }
        if (!at_keyword("STEP")) {
            fail({"INPUT", "STEP"});
        }
        while (at_keyword("STEP")) {
            p.steps.push_back(step());
        }
        expect_keyword("OUTPUT");
        p.output = identifier("output dataset name");
        if (peek().kind != TokenKind::End) {
            fail({"end of input"});
        }
        return p;
    }

    auto standalone_expression() -> ExprPtr {
        auto e = expression();
        if (peek().kind != TokenKind::End) {
            fail({"end of input"});
        }
        return e;
    }

private:
    // ── token helpers ──────────────────────────────────────────────────────

    [[nodiscard]] auto peek(std::size_t ahead = 0) const -> const Token& {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }

    auto next() -> const Token& {
        const Token& tok = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) {
            ++pos_;
        }
        return tok;
    }

    [[nodiscard]] auto at_keyword(std::string_view kw) const -> bool {
        return peek().kind == TokenKind::Keyword && peek().lexeme == kw;
    }

    [[nodiscard]] auto at_symbol(std::string_view sym) const -> bool {
        return peek().kind == TokenKind::Symbol && peek().lexeme == sym;
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string msg = "expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i > 0) {
                msg += i + 1 == expected.size() ? " or " : ", ";
            }
            msg += expected[i];
        }
        msg += ", found " + describe(peek());
        throw ParseError(msg, peek().location, std::move(expected));
    }

    auto expect_keyword(std::string_view kw) -> SourceLocation {
        if (!at_keyword(kw)) {
            fail({std::string(kw)});
        }
        return next().location;
    }

    auto expect_symbol(std::string_view sym) -> SourceLocation {
        if (!at_symbol(sym)) {
            fail({"'" + std::string(sym) + "'"});
        }
        return next().location;
    }

    auto identifier(std::string_view what) -> Name {
        if (peek().kind != TokenKind::Identifier) {
            fail({std::string(what)});
        }
        const Token& tok = next();
        return Name{tok.lexeme, tok.location};
    }

    auto string_literal(std::string_view what) -> std::string {
        if (peek().kind != TokenKind::StringLiteral) {
            fail({std::string(what)});
        }
        return next().lexeme;
    }

    auto identifier_list(std::string_view what) -> std::vector<Name> {
        std::vector<Name> names;
        names.push_back(identifier(what));
        while (at_symbol(",")) {
            next();
            names.push_back(identifier(what));
        }
        return names;
    }

    auto into() -> Name {
        expect_keyword("INTO");
        return identifier("target dataset name");
    }

    struct DepthGuard {
        explicit DepthGuard(Parser& p) : parser(p) {
            if (++parser.depth_ > detail::kMaxNestingDepth) {
                throw ParseError("nesting too deep", parser.peek().location);
            }
        }
        ~DepthGuard() { --parser.depth_; }
        DepthGuard(const DepthGuard&) = delete;
        auto operator=(const DepthGuard&) -> DepthGuard& = delete;
        Parser& parser;
    };

    // ── declarations ───────────────────────────────────────────────────────

    auto table_type() -> Schema {
        expect_keyword("TABLE");
        expect_symbol("[");
        std::vector<Field> fields;
        while (true) {
            Name name = identifier("field name");
            expect_symbol(":");
            if (peek().kind != TokenKind::Keyword || !parse_type_name(peek().lexeme)) {
                fail({"INT", "STRING", "DECIMAL", "BOOL", "DATE", "DATETIME"});
            }
            ValueType type = *parse_type_name(next().lexeme);
            for (const auto& f : fields) {
                if (f.name == name.text) {
                    throw ParseError("duplicate field '" + name.text + "' in TABLE type",
                                     name.location);
                }
            }
            fields.push_back({name.text, type});
            if (at_symbol(",")) {
                next();
                continue;
            }
            if (at_symbol("]")) {
                next();
                break;
            }
            fail({"','", "']'"});
        }
        return Schema(std::move(fields));
    }

    auto data_format() -> DataFormat {
        expect_keyword("AS");
        if (at_keyword("JSON")) {
            next();
            return DataFormat::Json;
        }
        if (at_keyword("CSV")) {
            next();
            return DataFormat::Csv;
        }
        fail({"JSON", "CSV"});
    }

    auto input() -> Input {
        Input in;
        in.location = expect_keyword("INPUT");
        in.name = identifier("input name");
        expect_symbol(":");
        in.schema = table_type();
        return in;
    }

    auto step() -> Step {
        Step s;
        s.location = expect_keyword("STEP");
        s.name = identifier("step name");
        expect_symbol(":");
        s.body = block({"STEP", "OUTPUT"});
        return s;
    }

    // Statements up to (not including) one of `terminators`. Non-empty.
    auto block(const std::vector<std::string_view>& terminators) -> Block {
        DepthGuard guard(*this);
        Block body;
        auto at_terminator = [&] {
            return std::any_of(terminators.begin(), terminators.end(),
                               [&](std::string_view kw) { return at_keyword(kw); });
        };
        while (!at_terminator()) {
            if (peek().kind == TokenKind::End && !body.empty()) {
                std::vector<std::string> expected;
                for (auto kw : terminators) {
                    expected.emplace_back(kw);
                }
                fail(std::move(expected));
            }
            body.push_back(statement());
        }
        if (body.empty()) {
            statement();  // reports "expected statement"
        }
        return body;
    }

    // ── statements ─────────────────────────────────────────────────────────

    using StatementParser = Statement (Parser::*)(SourceLocation);

    static auto productions() -> const std::unordered_map<std::string_view, StatementParser>& {
        static const std::unordered_map<std::string_view, StatementParser> table = {
            {"FILTER", &Parser::filter_stmt},
            {"SELECT", &Parser::select_stmt},
            {"DISTINCT", &Parser::distinct_stmt},
            {"MAP", &Parser::map_stmt},
            {"RENAME", &Parser::rename_stmt},
            {"DROP", &Parser::drop_stmt},
            {"ADD_COLUMN", &Parser::add_column_stmt},
            {"AGGREGATE", &Parser::aggregate_stmt},
            {"SORT", &Parser::sort_stmt},
            {"LIMIT", &Parser::limit_stmt},
            {"SKIP", &Parser::skip_stmt},
            {"SLICE", &Parser::slice_stmt},
            {"JOIN", &Parser::join_stmt},
            {"LEFT_JOIN", &Parser::join_stmt},
            {"UNION", &Parser::union_stmt},
            {"READ", &Parser::read_stmt},
            {"WRITE", &Parser::write_stmt},
            {"FETCH", &Parser::fetch_stmt},
            {"POST", &Parser::post_stmt},
            {"IF", &Parser::if_stmt},
            {"FOR_EACH", &Parser::for_each_stmt},
            {"WHILE", &Parser::while_stmt},
            {"TRY", &Parser::try_stmt},
        };
        return table;
    }

public:
    static auto production_count() -> std::size_t { return productions().size(); }

private:
    auto statement() -> Statement {
        if (peek().kind == TokenKind::Keyword) {
            auto it = productions().find(peek().lexeme);
            if (it != productions().end()) {
                SourceLocation loc = peek().location;
                return (this->*(it->second))(loc);
            }
        }
        fail({"statement"});
    }

    auto filter_stmt(SourceLocation loc) -> Statement {
        next();
        FilterStmt s;
        s.source = identifier("source dataset name");
        expect_keyword("WHERE");
        s.predicate = expression();
        s.target = into();
        return {loc, std::move(s)};
    }

    auto select_stmt(SourceLocation loc) -> Statement {
        next();
        SelectStmt s;
        s.source = identifier("source dataset name");
        expect_keyword("COLUMNS");
        s.columns = identifier_list("column name");
        s.target = into();
        return {loc, std::move(s)};
    }

    auto distinct_stmt(SourceLocation loc) -> Statement {
        next();
        DistinctStmt s;
        s.source = identifier("source dataset name");
        s.target = into();
        return {loc, std::move(s)};
    }

    auto map_stmt(SourceLocation loc) -> Statement {
        next();
        MapStmt s;
        s.source = identifier("source dataset name");
        expect_keyword("WITH");
        s.column = identifier("new column name");
        expect_symbol("=>");
        s.expr = expression();
        s.target = into();
        return {loc, std::move(s)};
    }

    auto rename_stmt(SourceLocation loc) -> Statement {
        next();
        RenameStmt s;
        s.source = identifier("source dataset name");
        expect_keyword("COLUMN");
        s.from = identifier("column name");
        expect_keyword("TO");
        s.to = identifier("new column name");
        s.target = into();
        return {loc, std::move(s)};
    }

    auto drop_stmt(SourceLocation loc) -> Statement {
        next();
        DropStmt s;
        s.source = identifier("source dataset name");
        expect_keyword("COLUMNS");
        s.columns = identifier_list("column name");
        s.target = into();
        return {loc, std::move(s)};
    }

    auto add_column_stmt(SourceLocation loc) -> Statement {
        next();
        AddColumnStmt s;
        s.source = identifier("source dataset name");
        expect_keyword("WITH");
        s.column = identifier("new column name");
        expect_symbol("=>");
        s.value = constant();
        s.target = into();
        return {loc, std::move(s)};
    }

    auto aggregate_stmt(SourceLocation loc) -> Statement {
        next();
        AggregateStmt s;
        s.source = identifier("source dataset name");
        if (at_keyword("GROUP_BY")) {
            next();
            s.group_by = identifier_list("grouping column name");
        }
        if (!at_keyword("COMPUTE")) {
            fail(s.group_by.empty() ? std::vector<std::string>{"GROUP_BY", "COMPUTE"}
                                    : std::vector<std::string>{"COMPUTE"});
        }
        next();
        s.computes.push_back(aggregate_spec());
        while (at_symbol(",")) {
            next();
            s.computes.push_back(aggregate_spec());
        }
        s.target = into();
        return {loc, std::move(s)};
    }

    auto aggregate_spec() -> AggregateSpec {
        AggregateSpec spec;
        spec.location = peek().location;
        Name fn = identifier("aggregate function (COUNT, SUM, AVG, MIN, MAX)");
        auto kind = parse_aggregate_fn(fn.text);
        if (!kind) {
            throw ParseError("unknown aggregate function '" + fn.text + "'", fn.location,
                             {"COUNT", "SUM", "AVG", "MIN", "MAX"});
        }
        spec.fn = *kind;
        expect_symbol("(");
        if (spec.fn == AggregateFn::Count) {
            if (!at_symbol(")")) {
                fail({"')' (COUNT takes no argument)"});
            }
        } else {
            spec.argument = expression();
        }
        expect_symbol(")");
        expect_keyword("AS");
        spec.alias = identifier("result column name");
        return spec;
    }

    auto sort_stmt(SourceLocation loc) -> Statement {
        next();
        SortStmt s;
        s.source = identifier("source dataset name");
        expect_keyword("BY");
        s.column = identifier("sort column name");
        if (at_keyword("ASC")) {
            s.direction = SortDirection::Asc;
        } else if (at_keyword("DESC")) {
            s.direction = SortDirection::Desc;
        } else {
            fail({"ASC", "DESC"});
        }
        next();
        s.target = into();
        return {loc, std::move(s)};
    }

    auto limit_stmt(SourceLocation loc) -> Statement {
        next();
        LimitStmt s;
        s.source = identifier("source dataset name");
        s.count = expression();
        s.target = into();
        return {loc, std::move(s)};
    }

    auto skip_stmt(SourceLocation loc) -> Statement {
        next();
        SkipStmt s;
        s.source = identifier("source dataset name");
        s.count = expression();
        s.target = into();
        return {loc, std::move(s)};
    }

    auto slice_stmt(SourceLocation loc) -> Statement {
        next();
        SliceStmt s;
        s.source = identifier("source dataset name");
        expect_keyword("FROM");
        s.from = expression();
        expect_keyword("TO");
        s.to = expression();
        s.target = into();
        return {loc, std::move(s)};
    }

    auto join_stmt(SourceLocation loc) -> Statement {
        JoinStmt s;
        s.kind = peek().lexeme == "LEFT_JOIN" ? JoinKind::Left : JoinKind::Inner;
        next();
        s.left = identifier("left dataset name");
        expect_keyword("WITH");
        s.right = identifier("right dataset name");
        expect_keyword("ON");
        s.left_key = identifier("left key column");
        expect_symbol("==");
        s.right_key = identifier("right key column");
        s.target = into();
        return {loc, std::move(s)};
    }

    auto union_stmt(SourceLocation loc) -> Statement {
        next();
        UnionStmt s;
        s.left = identifier("dataset name");
        expect_keyword("WITH");
        s.right = identifier("dataset name");
        s.target = into();
        return {loc, std::move(s)};
    }

    auto read_stmt(SourceLocation loc) -> Statement {
        next();
        ReadStmt s;
        s.path = string_literal("file path string");
        s.format = data_format();
        s.schema = table_type();
        s.target = into();
        return {loc, std::move(s)};
    }

    auto write_stmt(SourceLocation loc) -> Statement {
        next();
        WriteStmt s;
        s.source = identifier("source dataset name");
        expect_keyword("TO");
        s.path = string_literal("file path string");
        s.format = data_format();
        return {loc, std::move(s)};
    }

    auto fetch_stmt(SourceLocation loc) -> Statement {
        next();
        FetchStmt s;
        s.url = string_literal("URL string");
        s.schema = table_type();
        s.target = into();
        return {loc, std::move(s)};
    }

    auto post_stmt(SourceLocation loc) -> Statement {
        next();
        PostStmt s;
        s.source = identifier("source dataset name");
        expect_keyword("TO");
        s.url = string_literal("URL string");
        return {loc, std::move(s)};
    }

    auto if_stmt(SourceLocation loc) -> Statement {
        next();
        IfStmt s;
        s.condition = expression();
        expect_keyword("THEN");
        s.then_body = block({"ELSE", "END_IF"});
        if (at_keyword("ELSE")) {
            next();
            s.else_body = block({"END_IF"});
        }
        expect_keyword("END_IF");
        return {loc, std::move(s)};
    }

    auto for_each_stmt(SourceLocation loc) -> Statement {
        next();
        ForEachStmt s;
        s.row_var = identifier("row variable name");
        expect_keyword("IN");
        s.source = identifier("dataset name");
        expect_keyword("DO");
        s.body = block({"END_FOR"});
        expect_keyword("END_FOR");
        return {loc, std::move(s)};
    }

    auto while_stmt(SourceLocation loc) -> Statement {
        next();
        WhileStmt s;
        s.condition = expression();
        expect_keyword("DO");
        s.body = block({"END_WHILE"});
        expect_keyword("END_WHILE");
        return {loc, std::move(s)};
    }

    auto try_stmt(SourceLocation loc) -> Statement {
        next();
        TryStmt s;
        s.body = block({"ON_ERROR"});
        expect_keyword("ON_ERROR");
        s.handler = block({"END_TRY"});
        expect_keyword("END_TRY");
        return {loc, std::move(s)};
    }

    // ── expressions ────────────────────────────────────────────────────────

    auto expression() -> ExprPtr { return or_expr(); }

    auto or_expr() -> ExprPtr {
        auto lhs = and_expr();
        while (at_keyword("OR")) {
            SourceLocation loc = next().location;
            lhs = make_expr(loc, BinaryExpr{BinaryOp::Or, lhs, and_expr()});
        }
        return lhs;
    }

    auto and_expr() -> ExprPtr {
        auto lhs = not_expr();
        while (at_keyword("AND")) {
            SourceLocation loc = next().location;
            lhs = make_expr(loc, BinaryExpr{BinaryOp::And, lhs, not_expr()});
        }
        return lhs;
    }

    auto not_expr() -> ExprPtr {
        if (at_keyword("NOT")) {
            DepthGuard guard(*this);
            SourceLocation loc = next().location;
            return make_expr(loc, UnaryExpr{UnaryOp::Not, not_expr()});
        }
        return comparison();
    }

    auto comparison_op() const -> std::optional<BinaryOp> {
        if (peek().kind != TokenKind::Symbol) {
            return std::nullopt;
        }
        static const std::unordered_map<std::string_view, BinaryOp> ops = {
            {">", BinaryOp::Gt},  {">=", BinaryOp::Ge}, {"<", BinaryOp::Lt},
            {"<=", BinaryOp::Le}, {"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne},
        };
        auto it = ops.find(peek().lexeme);
        return it == ops.end() ? std::nullopt : std::optional(it->second);
    }

    auto comparison() -> ExprPtr {
        auto lhs = additive();
        if (auto op = comparison_op()) {
            SourceLocation loc = next().location;
            lhs = make_expr(loc, BinaryExpr{*op, lhs, additive()});
            if (comparison_op()) {
                throw ParseError("comparison operators do not chain; combine with AND",
                                 peek().location);
            }
        }
        return lhs;
    }

    auto additive() -> ExprPtr {
        auto lhs = multiplicative();
        while (at_symbol("+") || at_symbol("-")) {
            BinaryOp op = peek().lexeme == "+" ? BinaryOp::Add : BinaryOp::Sub;
            SourceLocation loc = next().location;
            lhs = make_expr(loc, BinaryExpr{op, lhs, multiplicative()});
        }
        return lhs;
    }

    auto multiplicative() -> ExprPtr {
        auto lhs = unary();
        while (at_symbol("*") || at_symbol("/")) {
            BinaryOp op = peek().lexeme == "*" ? BinaryOp::Mul : BinaryOp::Div;
            SourceLocation loc = next().location;
            lhs = make_expr(loc, BinaryExpr{op, lhs, unary()});
        }
        return lhs;
    }

    auto unary() -> ExprPtr {
        DepthGuard guard(*this);
        if (at_symbol("-")) {
            SourceLocation loc = next().location;
            return make_expr(loc, UnaryExpr{UnaryOp::Neg, unary()});
        }
        return primary();
    }

    auto typed_literal(ValueType type) -> ExprPtr {
        const Token& kw = next();
        if (peek().kind != TokenKind::StringLiteral) {
            fail({"string literal after " + kw.lexeme});
        }
        const Token& text = next();
        if (type == ValueType::Date) {
            auto d = Date::parse(text.lexeme);
            if (!d) {
                throw ParseError("invalid DATE literal \"" + text.lexeme + "\" (want YYYY-MM-DD)",
                                 text.location);
            }
            return make_expr(kw.location, LiteralExpr{Value(*d)});
        }
        auto dt = DateTime::parse(text.lexeme);
        if (!dt) {
            throw ParseError(
                "invalid DATETIME literal \"" + text.lexeme + "\" (want YYYY-MM-DDTHH:MM:SS)",
                text.location);
        }
        return make_expr(kw.location, LiteralExpr{Value(*dt)});
    }

    auto number_literal(bool negate) -> Value {
        const Token& tok = next();
        std::string text = (negate ? "-" : "") + tok.lexeme;
        if (tok.kind == TokenKind::IntLiteral) {
            std::int64_t v = 0;
            std::from_chars(text.data(), text.data() + text.size(), v);
            return Value(v);
        }
        return Value(Decimal::parse(text));
    }

    auto primary() -> ExprPtr {
        const Token& tok = peek();
        SourceLocation loc = tok.location;
        switch (tok.kind) {
            case TokenKind::IntLiteral:
            case TokenKind::DecimalLiteral:
                return make_expr(loc, LiteralExpr{number_literal(false)});
            case TokenKind::StringLiteral:
                return make_expr(loc, LiteralExpr{Value(next().lexeme)});
            case TokenKind::Keyword:
                if (tok.lexeme == "TRUE" || tok.lexeme == "FALSE") {
                    bool v = next().lexeme == "TRUE";
                    return make_expr(loc, LiteralExpr{Value(v)});
                }
                if (tok.lexeme == "NULL") {
                    next();
                    return make_expr(loc, LiteralExpr{Value::null()});
                }
                if (tok.lexeme == "DATE") {
                    return typed_literal(ValueType::Date);
                }
                if (tok.lexeme == "DATETIME") {
                    return typed_literal(ValueType::DateTime);
                }
                break;
            case TokenKind::Symbol:
                if (tok.lexeme == "(") {
                    next();
                    auto inner = expression();
                    expect_symbol(")");
                    return make_expr(loc, GroupExpr{inner});
                }
                break;
            case TokenKind::Identifier: {
                std::string name = next().lexeme;
                if (at_symbol("(")) {
                    next();
                    CallExpr call{name, {}};
                    if (!at_symbol(")")) {
                        call.args.push_back(expression());
                        while (at_symbol(",")) {
                            next();
                            call.args.push_back(expression());
                        }
                    }
                    expect_symbol(")");
                    return make_expr(loc, std::move(call));
                }
                if (at_symbol(".")) {
                    next();
                    Name field = identifier("field name");
                    return make_expr(loc, ColumnExpr{name, field.text});
                }
                return make_expr(loc, ColumnExpr{std::nullopt, name});
            }
            default:
                break;
        }
        fail({"expression"});
    }

    // ADD_COLUMN value: a literal, optionally a negated number.
    auto constant() -> ExprPtr {
        SourceLocation loc = peek().location;
        if (at_symbol("-")) {
            next();
            if (peek().kind != TokenKind::IntLiteral && peek().kind != TokenKind::DecimalLiteral) {
                fail({"number"});
            }
            return make_expr(loc, LiteralExpr{number_literal(true)});
        }
        switch (peek().kind) {
            case TokenKind::IntLiteral:
            case TokenKind::DecimalLiteral:
            case TokenKind::StringLiteral:
                return primary();
            case TokenKind::Keyword:
                if (at_keyword("TRUE") || at_keyword("FALSE") || at_keyword("NULL") ||
                    at_keyword("DATE") || at_keyword("DATETIME")) {
                    return primary();
                }
                break;
            default:
                break;
        }
        fail({"literal value"});
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

}  // namespace

auto parse(std::string_view source) -> Pipeline {
    return Parser(source).pipeline();
}

auto parse_expression(std::string_view source) -> ExprPtr {
    return Parser(source).standalone_expression();
}

auto statement_keywords() -> const std::vector<std::string_view>& {
    return kStatementKeywords;
}

namespace detail {

auto statement_production_count() -> std::size_t { return Parser::production_count(); }

}  // namespace detail

}  // namespace anka
