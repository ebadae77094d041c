#include <anka/validator.hpp>

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace anka {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void type_error(ValidationErrorKind kind, std::string message, SourceLocation loc) {
    throw TypeCheckError(ValidationError{kind, std::move(message), loc});
}

auto describe(ExprType t) -> std::string {
    return t ? std::string(type_name(*t)) : "NULL";
}

// ── builtin signatures ─────────────────────────────────────────────────────

using ArgCheck = std::function<bool(ValueType)>;

struct Signature {
    std::vector<ArgCheck> params;  // exact arity unless `variadic`
    bool variadic = false;         // params[0] repeated, at least two args
    ValueType result;
    std::string_view params_text;
};

auto is_type(ValueType want) -> ArgCheck {
    return [want](ValueType t) { return t == want; };
}

auto any_of_types(std::vector<ValueType> types) -> ArgCheck {
    return [types = std::move(types)](ValueType t) {
        return std::find(types.begin(), types.end(), t) != types.end();
    };
}

auto builtin_signatures() -> const std::unordered_map<std::string_view, Signature>& {
    static const std::unordered_map<std::string_view, Signature> table = [] {
        auto s = is_type(ValueType::String);
        auto i = is_type(ValueType::Int);
        auto numeric_or_string =
            any_of_types({ValueType::String, ValueType::Int, ValueType::Decimal});
        auto temporal = any_of_types({ValueType::Date, ValueType::DateTime});
        auto anything = [](ValueType) { return true; };
        std::unordered_map<std::string_view, Signature> t;
        t["CONCAT"] = {{s}, true, ValueType::String, "STRING, STRING, ..."};
        t["UPPER"] = {{s}, false, ValueType::String, "STRING"};
        t["LOWER"] = {{s}, false, ValueType::String, "STRING"};
        t["TRIM"] = {{s}, false, ValueType::String, "STRING"};
        t["LENGTH"] = {{s}, false, ValueType::Int, "STRING"};
        t["SUBSTRING"] = {{s, i, i}, false, ValueType::String, "STRING, INT, INT"};
        t["REPLACE"] = {{s, s, s}, false, ValueType::String, "STRING, STRING, STRING"};
        t["TO_STRING"] = {{anything}, false, ValueType::String, "any"};
        t["TO_INT"] = {{numeric_or_string}, false, ValueType::Int, "STRING|INT|DECIMAL"};
        t["TO_DECIMAL"] = {{numeric_or_string}, false, ValueType::Decimal, "STRING|INT|DECIMAL"};
        t["YEAR"] = {{temporal}, false, ValueType::Int, "DATE|DATETIME"};
        t["MONTH"] = {{temporal}, false, ValueType::Int, "DATE|DATETIME"};
        t["DAY"] = {{temporal}, false, ValueType::Int, "DATE|DATETIME"};
        return t;
    }();
    return table;
}

auto typecheck_call(const CallExpr& call, const std::vector<ExprType>& args, SourceLocation loc)
    -> ExprType {
    const auto& sigs = builtin_signatures();
    auto it = sigs.find(call.function);
    if (it == sigs.end()) {
        type_error(ValidationErrorKind::InvalidArgument,
                   "unknown function '" + call.function + "'", loc);
    }
    const Signature& sig = it->second;
    bool arity_ok = sig.variadic ? args.size() >= 2 : args.size() == sig.params.size();
    if (!arity_ok) {
        type_error(ValidationErrorKind::InvalidArgument,
                   call.function + " expects (" + std::string(sig.params_text) + "), got " +
                       std::to_string(args.size()) + " argument(s)",
                   loc);
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
        const ArgCheck& check = sig.variadic ? sig.params[0] : sig.params[i];
        if (args[i] && !check(*args[i])) {
            type_error(ValidationErrorKind::TypeMismatch,
                       call.function + " argument " + std::to_string(i + 1) + ": expected " +
                           std::string(sig.params_text) + ", got " + describe(args[i]),
                       call.args[i]->location);
        }
    }
    return sig.result;
}

auto require_column(const Schema& schema, const Name& column, std::string_view dataset)
    -> const Field& {
    const Field* f = schema.find(column.text);
    if (f == nullptr) {
        type_error(ValidationErrorKind::UnknownColumn,
                   "unknown column '" + column.text + "' in dataset '" + std::string(dataset) +
                       "' " + schema.to_string(),
                   column.location);
    }
    return *f;
}

void require_unique_columns(const std::vector<Name>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (columns[i].text == columns[j].text) {
                type_error(ValidationErrorKind::SchemaMismatch,
                           "column '" + columns[i].text + "' listed twice", columns[i].location);
            }
        }
    }
}

void require_new_column(const Schema& schema, const Name& column) {
    if (schema.find(column.text) != nullptr) {
        type_error(ValidationErrorKind::SchemaMismatch,
                   "column '" + column.text + "' already exists; RENAME or DROP it first",
                   column.location);
    }
}

auto negative_literal(const Expr& e) -> bool {
    if (const auto* lit = std::get_if<LiteralExpr>(&e.node)) {
        return lit->value.type() == ValueType::Int && lit->value.as_int() < 0;
    }
    if (const auto* u = std::get_if<UnaryExpr>(&e.node)) {
        if (u->op == UnaryOp::Neg) {
            if (const auto* lit = std::get_if<LiteralExpr>(&u->operand->node)) {
                return lit->value.type() == ValueType::Int && lit->value.as_int() > 0;
            }
        }
    }
    if (const auto* g = std::get_if<GroupExpr>(&e.node)) {
        return negative_literal(*g->inner);
    }
    return false;
}

auto int_literal(const Expr& e) -> std::optional<std::int64_t> {
    if (const auto* lit = std::get_if<LiteralExpr>(&e.node)) {
        if (lit->value.type() == ValueType::Int) {
            return lit->value.as_int();
        }
    }
    return std::nullopt;
}

void check_bound(const ExprPtr& bound, const TypeScope& scope, std::string_view what) {
    ExprType t = typecheck_expr(*bound, scope);
    if (t != ValueType::Int) {
        type_error(ValidationErrorKind::TypeMismatch,
                   std::string(what) + " must be INT, got " + describe(t), bound->location);
    }
    if (negative_literal(*bound)) {
        type_error(ValidationErrorKind::InvalidArgument,
                   std::string(what) + " must not be negative", bound->location);
    }
}

auto lookup(const SchemaLookup& datasets, const Name& name) -> const Schema& {
    auto it = datasets.find(name.text);
    if (it == datasets.end()) {
        type_error(ValidationErrorKind::UnknownDataset, "unknown dataset '" + name.text + "'",
                   name.location);
    }
    return it->second;
}

// ── whole-pipeline validation ──────────────────────────────────────────────

// A dataset visible in some scope. A missing schema marks a binding whose
// statement failed to check; references to it are not re-reported.
using ScopeEntry = std::optional<Schema>;

struct Scope {
    const Scope* parent = nullptr;
    std::map<std::string, ScopeEntry, std::less<>> datasets;
    std::map<std::string, Schema, std::less<>> row_vars;

    [[nodiscard]] auto find_dataset(std::string_view name) const -> const ScopeEntry* {
        for (const Scope* s = this; s != nullptr; s = s->parent) {
            auto it = s->datasets.find(name);
            if (it != s->datasets.end()) {
                return &it->second;
            }
        }
        return nullptr;
    }

    [[nodiscard]] auto find_row_var(std::string_view name) const -> const Schema* {
        for (const Scope* s = this; s != nullptr; s = s->parent) {
            auto it = s->row_vars.find(name);
            if (it != s->row_vars.end()) {
                return &it->second;
            }
        }
        return nullptr;
    }

    [[nodiscard]] auto all_row_vars() const -> std::map<std::string, Schema, std::less<>> {
        std::map<std::string, Schema, std::less<>> out;
        for (const Scope* s = this; s != nullptr; s = s->parent) {
            for (const auto& [k, v] : s->row_vars) {
                out.emplace(k, v);
            }
        }
        return out;
    }
};

class Validator {
public:
    auto run(const Pipeline& p) -> ValidationResult {
        Scope root;
        for (const auto& in : p.inputs) {
            if (reserve(in.name, {})) {
                root.datasets[in.name.text] = in.schema;
                result_.environment.add(
                    {in.name.text, in.schema, BindingOrigin::Input, in.name.location, ""});
            }
        }
        for (const auto& step : p.steps) {
            block(step.body, root);
        }
        const ScopeEntry* out = root.find_dataset(p.output.text);
        if (out == nullptr) {
            error(ValidationErrorKind::OutputUndefined,
                  "OUTPUT '" + p.output.text + "' is not bound by any INPUT or INTO visible here",
                  p.output.location);
        } else if (result_.ok() && *out) {
            result_.output_schema = **out;
        }
        return std::move(result_);
    }

private:
    void error(ValidationErrorKind kind, std::string message, SourceLocation loc) {
        report({kind, std::move(message), loc});
    }

    void report(ValidationError e) {
        if (quiet_ == 0) {
            result_.errors.push_back(std::move(e));
        }
    }

    // Claims a dataset name pipeline-wide. `allowed` holds names that a
    // sibling branch bound and that this branch may bind again.
    auto reserve(const Name& name, const std::set<std::string>& allowed) -> bool {
        auto it = reserved_.find(name.text);
        if (it != reserved_.end() && !allowed.contains(name.text)) {
            error(ValidationErrorKind::DuplicateBinding,
                  "dataset '" + name.text + "' is already bound at " + to_string(it->second) +
                      "; every INTO target must be a new name",
                  name.location);
            return false;
        }
        reserved_.emplace(name.text, name.location);
        return true;
    }

    void block(const Block& body, Scope& scope, const std::set<std::string>& allowed = {}) {
        for (const auto& stmt : body) {
            statement(stmt, scope, allowed);
        }
    }

    // Snapshot of the schemas visible from `scope`; failed bindings are
    // omitted and tracked in `poisoned`.
    static void visible(const Scope& scope, SchemaLookup& out, std::set<std::string>& poisoned) {
        for (const Scope* s = &scope; s != nullptr; s = s->parent) {
            for (const auto& [name, entry] : s->datasets) {
                if (out.contains(name) || poisoned.contains(name)) {
                    continue;
                }
                if (entry) {
                    out.emplace(name, *entry);
                } else {
                    poisoned.insert(name);
                }
            }
        }
    }

    // True if any dataset the statement reads is missing; reports unknown
    // ones and stays silent for poisoned ones.
    auto sources_unresolved(const Statement& stmt, const Scope& scope) -> bool {
        std::vector<const Name*> sources;
        std::visit(
            overloaded{
                [&](const JoinStmt& s) {
                    sources.push_back(&s.left);
                    sources.push_back(&s.right);
                },
                [&](const UnionStmt& s) {
                    sources.push_back(&s.left);
                    sources.push_back(&s.right);
                },
                [&](const ReadStmt&) {},
                [&](const FetchStmt&) {},
                [&](const IfStmt&) {},
                [&](const WhileStmt&) {},
                [&](const TryStmt&) {},
                [&](const auto& s) {
                    if constexpr (requires { s.source; }) {
                        sources.push_back(&s.source);
                    }
                },
            },
            stmt.node);
        bool missing = false;
        for (const Name* n : sources) {
            const ScopeEntry* entry = scope.find_dataset(n->text);
            if (entry == nullptr) {
                error(ValidationErrorKind::UnknownDataset, "unknown dataset '" + n->text + "'",
                      n->location);
                missing = true;
            } else if (!*entry) {
                missing = true;
            }
        }
        return missing;
    }

    void bind(Scope& scope, const Name& target, ScopeEntry schema, const Statement& stmt,
              const std::set<std::string>& allowed) {
        if (!reserve(target, allowed)) {
            return;
        }
        if (schema) {
            result_.environment.add({target.text, *schema, BindingOrigin::Statement,
                                     target.location, std::string(statement_keyword(stmt))});
        }
        scope.datasets[target.text] = std::move(schema);
    }

    void statement(const Statement& stmt, Scope& scope, const std::set<std::string>& allowed) {
        if (std::holds_alternative<IfStmt>(stmt.node)) {
            const auto& s = std::get<IfStmt>(stmt.node);
            scalar_condition(*s.condition, scope, "IF condition");
            branches(s.then_body, s.else_body ? &*s.else_body : nullptr, scope, allowed);
            return;
        }
        if (std::holds_alternative<TryStmt>(stmt.node)) {
            const auto& s = std::get<TryStmt>(stmt.node);
            branches(s.body, &s.handler, scope, allowed);
            return;
        }
        if (std::holds_alternative<WhileStmt>(stmt.node)) {
            const auto& s = std::get<WhileStmt>(stmt.node);
            scalar_condition(*s.condition, scope, "WHILE condition");
            Scope body{&scope, {}, {}};
            block(s.body, body);
            return;
        }
        if (std::holds_alternative<ForEachStmt>(stmt.node)) {
            for_each(std::get<ForEachStmt>(stmt.node), scope);
            return;
        }

        const Name* target = statement_target(stmt);
        if (sources_unresolved(stmt, scope)) {
            if (target != nullptr) {
                bind(scope, *target, std::nullopt, stmt, allowed);
            }
            return;
        }
        SchemaLookup datasets;
        std::set<std::string> poisoned;
        visible(scope, datasets, poisoned);
        auto row_vars = scope.all_row_vars();
        ScopeEntry schema;
        try {
            if (target != nullptr) {
                schema = infer_statement_schema(stmt, datasets, row_vars);
            }
        } catch (const TypeCheckError& e) {
            report(e.error());
        }
        if (target != nullptr) {
            bind(scope, *target, std::move(schema), stmt, allowed);
        }
    }

    void scalar_condition(const Expr& cond, const Scope& scope, std::string_view what) {
        auto row_vars = scope.all_row_vars();
        try {
            ExprType t = typecheck_expr(cond, TypeScope{nullptr, &row_vars});
            if (t && *t != ValueType::Bool) {
                error(ValidationErrorKind::TypeMismatch,
                      std::string(what) + " must be BOOL, got " + describe(t), cond.location);
            }
        } catch (const TypeCheckError& e) {
            report(e.error());
        }
    }

    void branches(const Block& first, const Block* second, Scope& scope,
                  const std::set<std::string>& allowed) {
        Scope a{&scope, {}, {}};
        block(first, a, allowed);
        if (second == nullptr) {
            return;
        }
        std::set<std::string> again = allowed;
        for (const auto& [name, entry] : a.datasets) {
            again.insert(name);
        }
        Scope b{&scope, {}, {}};
        block(*second, b, again);
        for (const auto& [name, entry] : a.datasets) {
            auto other = b.datasets.find(name);
            if (other == b.datasets.end()) {
                continue;
            }
            if (entry && other->second && *entry != *other->second) {
                error(ValidationErrorKind::SchemaMismatch,
                      "dataset '" + name + "' is bound with " + entry->to_string() +
                          " in one branch and " + other->second->to_string() + " in the other",
                      reserved_.at(name));
                scope.datasets[name] = std::nullopt;
                continue;
            }
            scope.datasets[name] = (entry && other->second) ? entry : std::nullopt;
        }
    }

    void for_each(const ForEachStmt& s, Scope& scope) {
        Scope body{&scope, {}, {}};
        const ScopeEntry* src = scope.find_dataset(s.source.text);
        if (src == nullptr) {
            error(ValidationErrorKind::UnknownDataset, "unknown dataset '" + s.source.text + "'",
                  s.source.location);
        }
        if (scope.find_row_var(s.row_var.text) != nullptr ||
            scope.find_dataset(s.row_var.text) != nullptr) {
            error(ValidationErrorKind::DuplicateBinding,
                  "row variable '" + s.row_var.text + "' shadows an existing name",
                  s.row_var.location);
        }
        if (src != nullptr && *src) {
            body.row_vars[s.row_var.text] = **src;
            block(s.body, body);
        } else {
            // Without a row schema the body cannot be checked meaningfully;
            // still reserve its names.
            Scope inert{&scope, {}, {}};
            inert.row_vars[s.row_var.text] = Schema();
            ++quiet_;
            block(s.body, inert);
            --quiet_;
        }
    }

    ValidationResult result_;
    std::map<std::string, SourceLocation, std::less<>> reserved_;
    int quiet_ = 0;
};

}  // namespace

auto validation_error_kind_name(ValidationErrorKind kind) -> std::string_view {
    switch (kind) {
        case ValidationErrorKind::UnknownDataset:
            return "UnknownDataset";
        case ValidationErrorKind::DuplicateBinding:
            return "DuplicateBinding";
        case ValidationErrorKind::UnknownColumn:
            return "UnknownColumn";
        case ValidationErrorKind::TypeMismatch:
            return "TypeMismatch";
        case ValidationErrorKind::SchemaMismatch:
            return "SchemaMismatch";
        case ValidationErrorKind::OutputUndefined:
            return "OutputUndefined";
        case ValidationErrorKind::InvalidArgument:
            return "InvalidArgument";
    }
    return "Unknown";
}

auto Environment::find(std::string_view name) const -> const Binding* {
    for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it) {
        if (it->name == name) {
            return &*it;
        }
    }
    return nullptr;
}

auto validate(const Pipeline& pipeline) -> ValidationResult {
    return Validator().run(pipeline);
}

auto typecheck_expr(const Expr& expr, const TypeScope& scope) -> ExprType {
    return std::visit(
        overloaded{
            [&](const LiteralExpr& lit) -> ExprType { return lit.value.type(); },
            [&](const ColumnExpr& col) -> ExprType {
                if (col.qualifier) {
                    const Schema* row = nullptr;
                    if (scope.row_vars != nullptr) {
                        auto it = scope.row_vars->find(*col.qualifier);
                        if (it != scope.row_vars->end()) {
                            row = &it->second;
                        }
                    }
                    if (row == nullptr) {
                        type_error(ValidationErrorKind::UnknownDataset,
                                   "unknown row variable '" + *col.qualifier + "'",
                                   expr.location);
                    }
                    const Field* f = row->find(col.name);
                    if (f == nullptr) {
                        type_error(ValidationErrorKind::UnknownColumn,
                                   "row variable '" + *col.qualifier + "' has no column '" +
                                       col.name + "'",
                                   expr.location);
                    }
                    return f->type;
                }
                if (scope.row == nullptr) {
                    type_error(ValidationErrorKind::UnknownColumn,
                               "column '" + col.name +
                                   "' referenced outside a row context; use row.column inside "
                                   "FOR_EACH",
                               expr.location);
                }
                const Field* f = scope.row->find(col.name);
                if (f == nullptr) {
                    type_error(ValidationErrorKind::UnknownColumn,
                               "unknown column '" + col.name + "' in " + scope.row->to_string(),
                               expr.location);
                }
                return f->type;
            },
            [&](const UnaryExpr& u) -> ExprType {
                ExprType t = typecheck_expr(*u.operand, scope);
                if (u.op == UnaryOp::Neg) {
                    if (t && !is_numeric(*t)) {
                        type_error(ValidationErrorKind::TypeMismatch,
                                   "unary '-' needs INT or DECIMAL, got " + describe(t),
                                   expr.location);
                    }
                    return t;
                }
                if (t && *t != ValueType::Bool) {
                    type_error(ValidationErrorKind::TypeMismatch,
                               "NOT needs BOOL, got " + describe(t), expr.location);
                }
                return ValueType::Bool;
            },
            [&](const BinaryExpr& b) -> ExprType {
                ExprType l = typecheck_expr(*b.lhs, scope);
                ExprType r = typecheck_expr(*b.rhs, scope);
                std::string op(binary_op_symbol(b.op));
                switch (b.op) {
                    case BinaryOp::Add:
                    case BinaryOp::Sub:
                    case BinaryOp::Mul:
                    case BinaryOp::Div: {
                        if ((l && !is_numeric(*l)) || (r && !is_numeric(*r))) {
                            std::string hint =
                                (l == ValueType::String || r == ValueType::String) &&
                                        b.op == BinaryOp::Add
                                    ? "; use CONCAT for strings"
                                    : "";
                            type_error(ValidationErrorKind::TypeMismatch,
                                       "'" + op + "' needs INT or DECIMAL operands, got " +
                                           describe(l) + " and " + describe(r) + hint,
                                       expr.location);
                        }
                        if (!l && !r) {
                            return std::nullopt;
                        }
                        if (l == ValueType::Decimal || r == ValueType::Decimal) {
                            return ValueType::Decimal;
                        }
                        return ValueType::Int;
                    }
                    case BinaryOp::And:
                    case BinaryOp::Or:
                        if ((l && *l != ValueType::Bool) || (r && *r != ValueType::Bool)) {
                            type_error(ValidationErrorKind::TypeMismatch,
                                       op + " needs BOOL operands, got " + describe(l) + " and " +
                                           describe(r),
                                       expr.location);
                        }
                        return ValueType::Bool;
                    default:
                        if (l && r && !types_comparable(*l, *r)) {
                            type_error(ValidationErrorKind::TypeMismatch,
                                       "cannot compare " + describe(l) + " with " + describe(r),
                                       expr.location);
                        }
                        return ValueType::Bool;
                }
            },
            [&](const CallExpr& c) -> ExprType {
                std::vector<ExprType> args;
                args.reserve(c.args.size());
                for (const auto& a : c.args) {
                    args.push_back(typecheck_expr(*a, scope));
                }
                return typecheck_call(c, args, expr.location);
            },
            [&](const GroupExpr& g) -> ExprType { return typecheck_expr(*g.inner, scope); },
        },
        expr.node);
}

auto aggregate_result_type(AggregateFn fn, ExprType arg, SourceLocation location) -> ValueType {
    if (fn == AggregateFn::Count) {
        return ValueType::Int;
    }
    std::string name(aggregate_fn_name(fn));
    if (!arg) {
        type_error(ValidationErrorKind::InvalidArgument,
                   name + " argument has no type (NULL literal)", location);
    }
    switch (fn) {
        case AggregateFn::Sum:
        case AggregateFn::Avg:
            if (!is_numeric(*arg)) {
                type_error(ValidationErrorKind::TypeMismatch,
                           name + " needs INT or DECIMAL, got " + describe(arg), location);
            }
            return fn == AggregateFn::Avg ? ValueType::Decimal : *arg;
        default:
            if (*arg == ValueType::Bool) {
                type_error(ValidationErrorKind::TypeMismatch,
                           name + " needs INT, DECIMAL, STRING, DATE or DATETIME, got BOOL",
                           location);
            }
            return *arg;
    }
}

auto infer_statement_schema(const Statement& stmt, const SchemaLookup& datasets,
                            const std::map<std::string, Schema, std::less<>>& row_vars)
    -> Schema {
    auto scope_for = [&](const Schema& row) { return TypeScope{&row, &row_vars}; };
    TypeScope scalar{nullptr, &row_vars};
    return std::visit(
        overloaded{
            [&](const FilterStmt& s) -> Schema {
                const Schema& src = lookup(datasets, s.source);
                ExprType t = typecheck_expr(*s.predicate, scope_for(src));
                if (t && *t != ValueType::Bool) {
                    type_error(ValidationErrorKind::TypeMismatch,
                               "WHERE condition must be BOOL, got " + describe(t),
                               s.predicate->location);
                }
                return src;
            },
            [&](const SelectStmt& s) -> Schema {
                const Schema& src = lookup(datasets, s.source);
                require_unique_columns(s.columns);
                std::vector<Field> fields;
                for (const auto& c : s.columns) {
                    fields.push_back(require_column(src, c, s.source.text));
                }
                return Schema(std::move(fields));
            },
            [&](const DistinctStmt& s) -> Schema { return lookup(datasets, s.source); },
            [&](const MapStmt& s) -> Schema {
                const Schema& src = lookup(datasets, s.source);
                require_new_column(src, s.column);
                ExprType t = typecheck_expr(*s.expr, scope_for(src));
                if (!t) {
                    type_error(ValidationErrorKind::InvalidArgument,
                               "cannot infer a column type from a NULL expression",
                               s.expr->location);
                }
                auto fields = src.fields();
                fields.push_back({s.column.text, *t});
                return Schema(std::move(fields));
            },
            [&](const RenameStmt& s) -> Schema {
                const Schema& src = lookup(datasets, s.source);
                require_column(src, s.from, s.source.text);
                require_new_column(src, s.to);
                auto fields = src.fields();
                for (auto& f : fields) {
                    if (f.name == s.from.text) {
                        f.name = s.to.text;
                    }
                }
                return Schema(std::move(fields));
            },
            [&](const DropStmt& s) -> Schema {
                const Schema& src = lookup(datasets, s.source);
                require_unique_columns(s.columns);
                for (const auto& c : s.columns) {
                    require_column(src, c, s.source.text);
                }
                std::vector<Field> fields;
                for (const auto& f : src.fields()) {
                    bool dropped = std::any_of(s.columns.begin(), s.columns.end(),
                                               [&](const Name& n) { return n.text == f.name; });
                    if (!dropped) {
                        fields.push_back(f);
                    }
                }
                if (fields.empty()) {
                    type_error(ValidationErrorKind::SchemaMismatch,
                               "DROP would remove every column of '" + s.source.text + "'",
                               s.columns.front().location);
                }
                return Schema(std::move(fields));
            },
            [&](const AddColumnStmt& s) -> Schema {
                const Schema& src = lookup(datasets, s.source);
                require_new_column(src, s.column);
                ExprType t = typecheck_expr(*s.value, scalar);
                if (!t) {
                    type_error(ValidationErrorKind::InvalidArgument,
                               "ADD_COLUMN needs a typed constant, not NULL", s.value->location);
                }
                auto fields = src.fields();
                fields.push_back({s.column.text, *t});
                return Schema(std::move(fields));
            },
            [&](const AggregateStmt& s) -> Schema {
                const Schema& src = lookup(datasets, s.source);
                require_unique_columns(s.group_by);
                std::vector<Field> fields;
                for (const auto& g : s.group_by) {
                    fields.push_back(require_column(src, g, s.source.text));
                }
                for (const auto& c : s.computes) {
                    ExprType arg;
                    if (c.argument) {
                        arg = typecheck_expr(*c.argument, scope_for(src));
                    }
                    ValueType t = aggregate_result_type(c.fn, arg, c.location);
                    for (const auto& f : fields) {
                        if (f.name == c.alias.text) {
                            type_error(ValidationErrorKind::SchemaMismatch,
                                       "result column '" + c.alias.text + "' defined twice",
                                       c.alias.location);
                        }
                    }
                    fields.push_back({c.alias.text, t});
                }
                return Schema(std::move(fields));
            },
            [&](const SortStmt& s) -> Schema {
                const Schema& src = lookup(datasets, s.source);
                require_column(src, s.column, s.source.text);
                return src;
            },
            [&](const LimitStmt& s) -> Schema {
                const Schema& src = lookup(datasets, s.source);
                check_bound(s.count, scalar, "LIMIT count");
                return src;
            },
            [&](const SkipStmt& s) -> Schema {
                const Schema& src = lookup(datasets, s.source);
                check_bound(s.count, scalar, "SKIP count");
                return src;
            },
            [&](const SliceStmt& s) -> Schema {
                const Schema& src = lookup(datasets, s.source);
                check_bound(s.from, scalar, "SLICE start");
                check_bound(s.to, scalar, "SLICE end");
                auto from = int_literal(*s.from);
                auto to = int_literal(*s.to);
                if (from && to && *from > *to) {
                    type_error(ValidationErrorKind::InvalidArgument,
                               "SLICE start " + std::to_string(*from) + " exceeds end " +
                                   std::to_string(*to),
                               s.from->location);
                }
                return src;
            },
            [&](const JoinStmt& s) -> Schema {
                const Schema& left = lookup(datasets, s.left);
                const Schema& right = lookup(datasets, s.right);
                const Field& lk = require_column(left, s.left_key, s.left.text);
                const Field& rk = require_column(right, s.right_key, s.right.text);
                if (!types_comparable(lk.type, rk.type)) {
                    type_error(ValidationErrorKind::TypeMismatch,
                               "join keys have incompatible types " +
                                   std::string(type_name(lk.type)) + " and " +
                                   std::string(type_name(rk.type)),
                               s.right_key.location);
                }
                auto fields = left.fields();
                for (const auto& f : right.fields()) {
                    if (f.name == s.right_key.text) {
                        continue;
                    }
                    if (left.find(f.name) != nullptr) {
                        type_error(ValidationErrorKind::SchemaMismatch,
                                   "column '" + f.name + "' exists in both '" + s.left.text +
                                       "' and '" + s.right.text + "'; RENAME one side first",
                                   s.right.location);
                    }
                    fields.push_back(f);
                }
                return Schema(std::move(fields));
            },
            [&](const UnionStmt& s) -> Schema {
                const Schema& left = lookup(datasets, s.left);
                const Schema& right = lookup(datasets, s.right);
                if (left != right) {
                    type_error(ValidationErrorKind::SchemaMismatch,
                               "UNION needs identical schemas, got " + left.to_string() +
                                   " and " + right.to_string(),
                               s.right.location);
                }
                return left;
            },
            [&](const ReadStmt& s) -> Schema { return s.schema; },
            [&](const FetchStmt& s) -> Schema { return s.schema; },
            [&](const auto&) -> Schema {
                throw std::logic_error("statement " + std::string(statement_keyword(stmt)) +
                                       " does not produce a dataset");
            },
        },
        stmt.node);
}

auto block_bindings(const Block& block) -> std::set<std::string> {
    std::set<std::string> names;
    for (const auto& stmt : block) {
        if (const Name* t = statement_target(stmt)) {
            names.insert(t->text);
        } else if (const auto* s = std::get_if<IfStmt>(&stmt.node)) {
            auto exported = branch_exports(s->then_body, s->else_body ? &*s->else_body : nullptr);
            names.insert(exported.begin(), exported.end());
        } else if (const auto* s = std::get_if<TryStmt>(&stmt.node)) {
            auto exported = branch_exports(s->body, &s->handler);
            names.insert(exported.begin(), exported.end());
        }
    }
    return names;
}

auto branch_exports(const Block& first, const Block* second) -> std::set<std::string> {
    if (second == nullptr) {
        return {};
    }
    auto a = block_bindings(first);
    auto b = block_bindings(*second);
    std::set<std::string> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(both, both.begin()));
    return both;
}

auto diagnostics_to_json(const std::vector<ValidationError>& errors) -> nlohmann::ordered_json {
    auto out = nlohmann::ordered_json::array();
    for (const auto& e : errors) {
        out.push_back({{"kind", validation_error_kind_name(e.kind)},
                       {"message", e.message},
                       {"line", e.location.line},
                       {"column", e.location.column}});
    }
    return out;
}

}  // namespace anka
