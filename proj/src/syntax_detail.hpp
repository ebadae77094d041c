#pragma once

#include <anka/syntax.hpp>

namespace anka::detail {

/// Token stream terminated by a TokenKind::End token located at end of input.
auto tokenize_with_end(std::string_view source) -> std::vector<Token>;

/// Number of distinct statement productions registered in the parser.
auto statement_production_count() -> std::size_t;

/// Maximum nesting of expressions and blocks accepted by the parser.
inline constexpr int kMaxNestingDepth = 200;

}  // namespace anka::detail
