#pragma once

#include "generators.hpp"
#include "reference.hpp"

#include <anka/interpreter.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anka::testing {

enum class DataOp {
    Filter,
    Select,
    Distinct,
    Map,
    Rename,
    Drop,
    AddColumn,
    Aggregate,
    Sort,
    Limit,
    Skip,
    Slice,
    Join,
    LeftJoin,
    Union,
};

inline constexpr DataOp kDataOps[] = {
    DataOp::Filter, DataOp::Select, DataOp::Distinct,  DataOp::Map,  DataOp::Rename,
    DataOp::Drop,   DataOp::AddColumn, DataOp::Aggregate, DataOp::Sort, DataOp::Limit,
    DataOp::Skip,   DataOp::Slice,  DataOp::Join,      DataOp::LeftJoin, DataOp::Union,
};

/// Expression source text with its type and a reference evaluator.
struct ExprCase {
    std::string text;
    ValueType type;
    ref::CellFn eval;
};

/// Random BOOL expression over `schema`: comparisons with literals, bare BOOL
/// columns, AND/OR/NOT.
auto random_predicate(Rng& rng, const Schema& schema) -> ExprCase;

/// MAP expressions applicable to `schema`, one or more per column.
auto map_templates(const Schema& schema) -> std::vector<ExprCase>;

auto data_op_name(DataOp op) -> std::string_view;

/// Parses, validates and runs `source` in a sandbox. Throws on any failure.
auto run_source(std::string_view source, const InputTables& inputs) -> Table;

/// One randomized interpreter-vs-reference comparison. Returns a description
/// of the mismatch, or nullopt when both agree exactly.
auto check_random_case(DataOp op, Rng& rng) -> std::optional<std::string>;

}  // namespace anka::testing
