#pragma once

#include <anka/ast.hpp>
#include <anka/io.hpp>
#include <anka/table.hpp>

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace anka {

enum class RuntimeErrorKind {
    DivisionByZero,
    IoError,
    HttpError,
    ConversionError,
    AssertionFailed,
    /// Wall-clock budget exhausted. Not catchable by TRY.
    Timeout,
};

auto runtime_error_kind_name(RuntimeErrorKind kind) -> std::string_view;

/// A failure while executing a pipeline. Carries the location of the
/// innermost statement being executed.
class RuntimeError : public std::runtime_error {
public:
    RuntimeError(RuntimeErrorKind kind, std::string message,
                 std::optional<SourceLocation> location = std::nullopt);

    [[nodiscard]] auto kind() const noexcept -> RuntimeErrorKind { return kind_; }
    [[nodiscard]] auto message() const noexcept -> const std::string& { return message_; }
    [[nodiscard]] auto location() const noexcept -> const std::optional<SourceLocation>& {
        return location_;
    }
    /// Sets the location if none is set yet.
    void attach_location(SourceLocation loc);

    [[nodiscard]] auto what() const noexcept -> const char* override { return what_.c_str(); }

private:
    void refresh();

    RuntimeErrorKind kind_;
    std::string message_;
    std::optional<SourceLocation> location_;
    std::string what_;
};

/// Input tables missing or not matching their INPUT declarations. Raised
/// before any statement runs.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A name or type error that static validation should have excluded.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct RunOptions {
    /// READ/WRITE/FETCH/POST fail with IoError/HttpError without calling the
    /// adapter.
    bool sandboxed = false;
    std::uint64_t while_cap = 100'000;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

using InputTables = std::map<std::string, Table, std::less<>>;

/// Executes a validated pipeline and returns the OUTPUT table. Throws
/// InputError, RuntimeError, or InternalError.
auto run_pipeline(const Pipeline& pipeline, const InputTables& inputs, IoAdapter& io,
                  const RunOptions& options = {}) -> Table;

/// Checks `inputs` against the pipeline's INPUT declarations.
void check_inputs(const Pipeline& pipeline, const InputTables& inputs);

// ─── evaluation primitives ───────────────────────────────────────────────────

/// Cooperative wall-clock check shared by one pipeline run.
class Budget {
public:
    Budget() = default;
    explicit Budget(std::optional<std::chrono::steady_clock::time_point> deadline)
        : deadline_(deadline) {}

    /// Throws RuntimeError(Timeout) once the deadline has passed. Reads the
    /// clock every few hundred calls.
    void tick() {
        if (deadline_ && ++ticks_ % 256 == 0) {
            check();
        }
    }
    void check() const;

private:
    std::optional<std::chrono::steady_clock::time_point> deadline_;
    std::uint64_t ticks_ = 0;
};

struct RowRef {
    const Schema* schema = nullptr;
    const Row* row = nullptr;
};

/// Names an expression can read while being evaluated.
struct EvalScope {
    /// Current row of the table being processed, for unqualified columns.
    RowRef row;
    /// FOR_EACH row variables, for `var.column`.
    const std::map<std::string, RowRef, std::less<>>* row_vars = nullptr;
};

/// Evaluates a type-checked expression. Null propagates through arithmetic,
/// comparisons, and builtins; AND/OR short-circuit with three-valued logic.
auto eval_expr(const Expr& expr, const EvalScope& scope) -> Value;

/// Row-level operators. Each returns a new table and leaves its inputs intact.
namespace ops {

using RowVars = std::map<std::string, RowRef, std::less<>>;

auto filter(const Table& src, const Expr& predicate, const RowVars& vars, Budget& budget) -> Table;
auto map_column(const Table& src, const std::string& column, const Expr& expr, const RowVars& vars,
                Budget& budget) -> Table;
auto add_column(const Table& src, const std::string& column, const Value& value) -> Table;
auto select(const Table& src, const std::vector<std::string>& columns) -> Table;
auto distinct(const Table& src, Budget& budget) -> Table;
auto rename(const Table& src, const std::string& from, const std::string& to) -> Table;
auto drop(const Table& src, const std::vector<std::string>& columns) -> Table;

struct AggregateCall {
    AggregateFn fn;
    ExprPtr argument;  // null for COUNT
    std::string alias;
};

auto aggregate(const Table& src, const std::vector<std::string>& group_by,
               const std::vector<AggregateCall>& computes, const RowVars& vars, Budget& budget)
    -> Table;
auto sort(const Table& src, const std::string& column, SortDirection direction) -> Table;
auto limit(const Table& src, std::int64_t count) -> Table;
auto skip(const Table& src, std::int64_t count) -> Table;
auto slice(const Table& src, std::int64_t from, std::int64_t to) -> Table;
auto join(const Table& left, const Table& right, const std::string& left_key,
          const std::string& right_key, JoinKind kind, Budget& budget) -> Table;
auto union_all(const Table& left, const Table& right) -> Table;

}  // namespace ops

}  // namespace anka
