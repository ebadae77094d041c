#pragma once

#include <anka/ast.hpp>

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace anka {

enum class TokenKind {
    Keyword,
    Identifier,
    IntLiteral,
    DecimalLiteral,
    StringLiteral,
    Symbol,
    End,
};

auto token_kind_name(TokenKind kind) -> std::string_view;

struct Token {
    TokenKind kind;
    /// Source spelling; for string literals, the decoded contents.
    std::string lexeme;
    SourceLocation location;
};

/// A located syntax error. `what()` is `line:column: message`.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, SourceLocation location,
               std::vector<std::string> expected = {});

    [[nodiscard]] auto message() const noexcept -> const std::string& { return message_; }
    [[nodiscard]] auto location() const noexcept -> const SourceLocation& { return location_; }
    [[nodiscard]] auto expected() const noexcept -> const std::vector<std::string>& {
        return expected_;
    }

private:
    std::string message_;
    SourceLocation location_;
    std::vector<std::string> expected_;
};

/// Reserved upper-case words. Identifiers may not use them.
auto is_keyword(std::string_view word) -> bool;

/// Throws ParseError. The returned sequence has no end token.
auto tokenize(std::string_view source) -> std::vector<Token>;

/// Throws ParseError on the first syntax error.
auto parse(std::string_view source) -> Pipeline;

/// Parses a lone expression (used by tests and tooling).
auto parse_expression(std::string_view source) -> ExprPtr;

/// Keywords that begin a statement, one grammar production each.
auto statement_keywords() -> const std::vector<std::string_view>&;

/// Canonical source text; re-parses to a structurally equal pipeline.
auto format_pipeline(const Pipeline& pipeline) -> std::string;
auto format_expr(const Expr& expr) -> std::string;
auto format_literal(const Value& value) -> std::string;

/// JSON tree of the AST. Locations are included unless `with_locations` is
/// false, which yields a purely structural form.
auto pipeline_to_json(const Pipeline& pipeline, bool with_locations = true) -> nlohmann::ordered_json;
auto expr_to_json(const Expr& expr, bool with_locations = true) -> nlohmann::ordered_json;

/// Equality ignoring source locations.
auto structurally_equal(const Pipeline& a, const Pipeline& b) -> bool;

}  // namespace anka
