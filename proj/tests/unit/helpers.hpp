#pragma once

#include "generators.hpp"

#include <anka/interpreter.hpp>
#include <anka/syntax.hpp>
#include <anka/table.hpp>
#include <anka/validator.hpp>

#include <initializer_list>
#include <string>
#include <vector>

namespace gen = anka::testing;

namespace anka::unit {

inline auto dec(std::string_view text) -> Value {
    return Value(Decimal::parse(text));
}

inline auto date(std::string_view text) -> Value {
    return Value(*Date::parse(text));
}

inline auto schema(std::initializer_list<Field> fields) -> Schema {
    return Schema(std::vector<Field>(fields));
}

inline auto table(const Schema& s, std::vector<Row> rows) -> Table {
    return make_table(s, std::move(rows));
}

/// Parses, validates (must succeed) and runs in a sandbox.
inline auto run(std::string_view source, const InputTables& inputs, RunOptions options = {}) -> Table {
    Pipeline p = parse(source);
    ValidationResult v = validate(p);
    if (!v.ok()) {
        throw std::runtime_error("invalid: " + v.errors.front().message);
    }
    DenyAllIoAdapter io;
    options.sandboxed = true;
    return run_pipeline(p, inputs, io, options);
}

/// One-input pipeline `t` with a single step body; output `r`.
inline auto program(const std::string& input_schema, const std::string& body,
                    const std::string& output = "r") -> std::string {
    return "PIPELINE p:\n  INPUT t: " + input_schema + "\n  STEP s:\n" + body + "\n  OUTPUT " +
           output + "\n";
}

inline auto validation_kinds(std::string_view source) -> std::vector<ValidationErrorKind> {
    std::vector<ValidationErrorKind> out;
    for (const auto& e : validate(parse(source)).errors) {
        out.push_back(e.kind);
    }
    return out;
}

}  // namespace anka::unit
