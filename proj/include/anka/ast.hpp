#pragma once

#include <anka/table.hpp>
#include <anka/value.hpp>

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace anka {

/// Line and column are 1-based (column counts code points); offset is the
/// 0-based byte offset into the source.
struct SourceLocation {
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t offset = 0;

    friend auto operator==(const SourceLocation&, const SourceLocation&) -> bool = default;
};

auto to_string(const SourceLocation& loc) -> std::string;

/// An identifier occurrence.
struct Name {
    std::string text;
    SourceLocation location;
};

// ─── Expressions ─────────────────────────────────────────────────────────────

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnaryOp { Neg, Not };

auto binary_op_symbol(BinaryOp op) -> std::string_view;

/// A null Value stands for the NULL literal.
struct LiteralExpr {
    Value value;
};

/// `name` or `row.name`; the qualified form reads a FOR_EACH row variable.
struct ColumnExpr {
    std::optional<std::string> qualifier;
    std::string name;
};

struct UnaryExpr {
    UnaryOp op;
    ExprPtr operand;
};

struct BinaryExpr {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

struct CallExpr {
    std::string function;
    std::vector<ExprPtr> args;
};

/// Parenthesized sub-expression, kept so that formatting reproduces it.
struct GroupExpr {
    ExprPtr inner;
};

struct Expr {
    SourceLocation location;
    std::variant<LiteralExpr, ColumnExpr, UnaryExpr, BinaryExpr, CallExpr, GroupExpr> node;
};

template <typename Node>
auto make_expr(SourceLocation loc, Node node) -> ExprPtr {
    return std::make_shared<const Expr>(Expr{loc, std::move(node)});
}

// ─── Statements ──────────────────────────────────────────────────────────────

struct Statement;
using Block = std::vector<Statement>;

enum class DataFormat { Json, Csv };
enum class SortDirection { Asc, Desc };
enum class JoinKind { Inner, Left };
enum class AggregateFn { Count, Sum, Avg, Min, Max };

auto aggregate_fn_name(AggregateFn fn) -> std::string_view;
auto parse_aggregate_fn(std::string_view name) -> std::optional<AggregateFn>;

struct FilterStmt {
    Name source;
    ExprPtr predicate;
    Name target;
};

struct SelectStmt {
    Name source;
    std::vector<Name> columns;
    Name target;
};

struct DistinctStmt {
    Name source;
    Name target;
};

struct MapStmt {
    Name source;
    Name column;
    ExprPtr expr;
    Name target;
};

struct RenameStmt {
    Name source;
    Name from;
    Name to;
    Name target;
};

struct DropStmt {
    Name source;
    std::vector<Name> columns;
    Name target;
};

/// The value is always a literal (possibly negated number).
struct AddColumnStmt {
    Name source;
    Name column;
    ExprPtr value;
    Name target;
};

struct AggregateSpec {
    AggregateFn fn;
    ExprPtr argument;  // null for COUNT()
    Name alias;
    SourceLocation location;
};

struct AggregateStmt {
    Name source;
    std::vector<Name> group_by;
    std::vector<AggregateSpec> computes;
    Name target;
};

struct SortStmt {
    Name source;
    Name column;
    SortDirection direction;
    Name target;
};

struct LimitStmt {
    Name source;
    ExprPtr count;
    Name target;
};

struct SkipStmt {
    Name source;
    ExprPtr count;
    Name target;
};

/// Half-open [from, to) over 0-based row positions.
struct SliceStmt {
    Name source;
    ExprPtr from;
    ExprPtr to;
    Name target;
};

struct JoinStmt {
    JoinKind kind;
    Name left;
    Name right;
    Name left_key;
    Name right_key;
    Name target;
};

struct UnionStmt {
    Name left;
    Name right;
    Name target;
};

struct ReadStmt {
    std::string path;
    DataFormat format;
    Schema schema;
    Name target;
};

struct WriteStmt {
    Name source;
    std::string path;
    DataFormat format;
};

struct FetchStmt {
    std::string url;
    Schema schema;
    Name target;
};

struct PostStmt {
    Name source;
    std::string url;
};

struct IfStmt {
    ExprPtr condition;
    Block then_body;
    std::optional<Block> else_body;
};

struct ForEachStmt {
    Name row_var;
    Name source;
    Block body;
};

struct WhileStmt {
    ExprPtr condition;
    Block body;
};

struct TryStmt {
    Block body;
    Block handler;
};

struct Statement {
    SourceLocation location;
    std::variant<FilterStmt, SelectStmt, DistinctStmt, MapStmt, RenameStmt, DropStmt,
                 AddColumnStmt, AggregateStmt, SortStmt, LimitStmt, SkipStmt, SliceStmt,
                 JoinStmt, UnionStmt, ReadStmt, WriteStmt, FetchStmt, PostStmt, IfStmt,
                 ForEachStmt, WhileStmt, TryStmt>
        node;
};

/// The leading keyword of a statement (`LEFT_JOIN` for a left join).
auto statement_keyword(const Statement& stmt) -> std::string_view;

/// The INTO target, for statements that produce a dataset.
auto statement_target(const Statement& stmt) -> const Name*;

struct Input {
    Name name;
    Schema schema;
    SourceLocation location;
};

struct Step {
    Name name;
    Block body;
    SourceLocation location;
};

struct Pipeline {
    Name name;
    std::vector<Input> inputs;
    std::vector<Step> steps;
    Name output;
    SourceLocation location;
};

}  // namespace anka
