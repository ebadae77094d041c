#pragma once

#include <anka/ast.hpp>
#include <anka/table.hpp>

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace anka {

enum class ValidationErrorKind {
    UnknownDataset,
    DuplicateBinding,
    UnknownColumn,
    TypeMismatch,
    SchemaMismatch,
    OutputUndefined,
    /// Unknown function, wrong arity, negative literal bound, NULL-typed column.
    InvalidArgument,
};

auto validation_error_kind_name(ValidationErrorKind kind) -> std::string_view;

struct ValidationError {
    ValidationErrorKind kind;
    std::string message;
    SourceLocation location;
};

/// Thrown by the single-node checkers below; validate() collects these.
class TypeCheckError : public std::runtime_error {
public:
    explicit TypeCheckError(ValidationError error)
        : std::runtime_error(error.message), error_(std::move(error)) {}
    [[nodiscard]] auto error() const noexcept -> const ValidationError& { return error_; }

private:
    ValidationError error_;
};

enum class BindingOrigin { Input, Statement };

struct Binding {
    std::string name;
    Schema schema;
    BindingOrigin origin;
    /// INPUT declaration or the INTO target of the binding statement.
    SourceLocation location;
    /// Leading keyword of the binding statement; empty for inputs.
    std::string statement;
};

/// Every dataset binding made by the pipeline, in textual order, with the
/// inferred schema of each.
class Environment {
public:
    void add(Binding binding) { bindings_.push_back(std::move(binding)); }
    [[nodiscard]] auto bindings() const noexcept -> const std::vector<Binding>& { return bindings_; }
    /// Last binding of `name`, if any.
    [[nodiscard]] auto find(std::string_view name) const -> const Binding*;

private:
    std::vector<Binding> bindings_;
};

struct ValidationResult {
    Environment environment;
    std::vector<ValidationError> errors;
    /// Schema of the OUTPUT dataset; set when validation succeeded.
    std::optional<Schema> output_schema;

    [[nodiscard]] auto ok() const noexcept -> bool { return errors.empty(); }
};

/// Checks every statement in textual order and collects all errors. Never
/// throws on malformed programs.
auto validate(const Pipeline& pipeline) -> ValidationResult;

/// Static type of an expression: nullopt is the type of the NULL literal,
/// which is compatible with every type.
using ExprType = std::optional<ValueType>;

/// What names an expression may reference: unqualified columns resolve
/// against `row` (if any); `row.col` resolves against FOR_EACH variables.
struct TypeScope {
    const Schema* row = nullptr;
    const std::map<std::string, Schema, std::less<>>* row_vars = nullptr;
};

/// Throws TypeCheckError (UnknownColumn, UnknownDataset, TypeMismatch,
/// InvalidArgument).
auto typecheck_expr(const Expr& expr, const TypeScope& scope) -> ExprType;

/// Result type of an aggregate over an argument of type `arg` (ignored for
/// COUNT). Throws TypeCheckError.
auto aggregate_result_type(AggregateFn fn, ExprType arg, SourceLocation location) -> ValueType;

/// Dataset schemas visible to a statement.
using SchemaLookup = std::map<std::string, Schema, std::less<>>;

/// Output schema of a data-producing statement given its input schemas.
/// Throws TypeCheckError. Not defined for WRITE/POST or control flow.
auto infer_statement_schema(const Statement& stmt, const SchemaLookup& datasets,
                            const std::map<std::string, Schema, std::less<>>& row_vars = {})
    -> Schema;

/// Names bound by a block that remain visible after it: INTO targets of its
/// top-level statements plus names exported by nested IF/TRY statements.
auto block_bindings(const Block& block) -> std::set<std::string>;

/// Names visible after an IF or TRY: those bound by both branches.
/// An IF without ELSE exports nothing.
auto branch_exports(const Block& first, const Block* second) -> std::set<std::string>;

/// `[{"kind": ..., "message": ..., "line": .., "column": ..}, ...]`
auto diagnostics_to_json(const std::vector<ValidationError>& errors) -> nlohmann::ordered_json;

}  // namespace anka
