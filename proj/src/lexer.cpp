#include <anka/syntax.hpp>

#include <algorithm>
#include <array>
#include <charconv>

namespace anka {

namespace {

constexpr std::string_view kKeywords[] = {
    "PIPELINE", "INPUT",    "TABLE",    "STEP",      "OUTPUT",   "FILTER",   "WHERE",
    "INTO",     "SELECT",   "COLUMNS",  "DISTINCT",  "MAP",      "WITH",     "RENAME",
    "COLUMN",   "TO",       "DROP",     "ADD_COLUMN", "AGGREGATE", "GROUP_BY", "COMPUTE",
    "AS",       "SORT",     "BY",       "ASC",       "DESC",     "LIMIT",    "SKIP",
    "SLICE",    "FROM",     "JOIN",     "LEFT_JOIN", "ON",       "UNION",    "READ",
    "WRITE",    "FETCH",    "POST",     "JSON",      "CSV",      "IF",       "THEN",
    "ELSE",     "END_IF",   "FOR_EACH", "IN",        "DO",       "END_FOR",  "WHILE",
    "END_WHILE", "TRY",     "ON_ERROR", "END_TRY",   "AND",      "OR",       "NOT",
    "TRUE",     "FALSE",    "NULL",     "INT",       "STRING",   "DECIMAL",  "BOOL",
    "DATE",     "DATETIME",
};

auto is_ident_start(char ch) -> bool {
    return (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') || ch == '_';
}

auto is_ident_char(char ch) -> bool {
    return is_ident_start(ch) || (ch >= '0' && ch <= '9');
}

auto is_digit(char ch) -> bool { return ch >= '0' && ch <= '9'; }

// Length of the UTF-8 sequence starting at `pos`, or 0 if invalid.
auto utf8_sequence_length(std::string_view text, std::size_t pos) -> std::size_t {
    auto byte = static_cast<unsigned char>(text[pos]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (byte < 0x80) {
        return 1;
    }
    if ((byte & 0xE0) == 0xC0) {
        len = 2;
        cp = byte & 0x1F;
    } else if ((byte & 0xF0) == 0xE0) {
        len = 3;
        cp = byte & 0x0F;
    } else if ((byte & 0xF8) == 0xF0) {
        len = 4;
        cp = byte & 0x07;
    } else {
        return 0;
    }
    if (pos + len > text.size()) {
        return 0;
    }
    for (std::size_t i = 1; i < len; ++i) {
        auto next = static_cast<unsigned char>(text[pos + i]);
        if ((next & 0xC0) != 0x80) {
            return 0;
        }
        cp = (cp << 6) | (next & 0x3F);
    }
    // Overlong forms, surrogates, and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        return 0;
    }
    return len;
}

class Lexer {
public:
    explicit Lexer(std::string_view source) : source_(source) {}

    auto run() -> std::vector<Token> {
        std::vector<Token> tokens;
        while (true) {
            skip_trivia();
            if (pos_ >= source_.size()) {
                break;
            }
            tokens.push_back(next_token());
        }
        tokens.push_back({TokenKind::End, "", here()});
        return tokens;
    }

private:
    [[nodiscard]] auto here() const -> SourceLocation { return {line_, column_, pos_}; }

    [[nodiscard]] auto peek(std::size_t ahead = 0) const -> char {
        return pos_ + ahead < source_.size() ? source_[pos_ + ahead] : '\0';
    }

    // Advances over one code point, keeping line/column in step.
    void advance() {
        char ch = source_[pos_];
        std::size_t len = utf8_sequence_length(source_, pos_);
        if (len == 0) {
            throw ParseError("invalid UTF-8 byte in source", here());
        }
        pos_ += len;
        if (ch == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
    }

    void skip_trivia() {
        while (pos_ < source_.size()) {
            char ch = peek();
            if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
                advance();
            } else if (ch == '#') {
                while (pos_ < source_.size() && peek() != '\n') {
                    advance();
                }
            } else {
                break;
            }
        }
    }

    auto next_token() -> Token {
        SourceLocation start = here();
        char ch = peek();
        if (is_ident_start(ch)) {
            std::size_t begin = pos_;
            while (pos_ < source_.size() && is_ident_char(peek())) {
                advance();
            }
            std::string word(source_.substr(begin, pos_ - begin));
            auto kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
            return {kind, std::move(word), start};
        }
        if (is_digit(ch)) {
            return number(start);
        }
        if (ch == '"') {
            return string_literal(start);
        }
        return symbol(start);
    }

    auto number(SourceLocation start) -> Token {
        std::size_t begin = pos_;
        while (is_digit(peek())) {
            advance();
        }
        bool is_decimal = false;
        if (peek() == '.' && is_digit(peek(1))) {
            is_decimal = true;
            advance();
            while (is_digit(peek())) {
                advance();
            }
        }
        if (is_ident_start(peek())) {
            throw ParseError("invalid numeric literal", start);
        }
        std::string text(source_.substr(begin, pos_ - begin));
        if (is_decimal) {
            try {
                (void)Decimal::parse(text);
            } catch (const DecimalError& e) {
                throw ParseError(e.what(), start);
            }
            return {TokenKind::DecimalLiteral, std::move(text), start};
        }
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw ParseError("integer literal out of range: " + text, start);
        }
        return {TokenKind::IntLiteral, std::move(text), start};
    }

    auto string_literal(SourceLocation start) -> Token {
        advance();  // opening quote
        std::string value;
        while (true) {
            if (pos_ >= source_.size() || peek() == '\n') {
                throw ParseError("unterminated string literal", start);
            }
            char ch = peek();
            if (ch == '"') {
                advance();
                break;
            }
            if (ch == '\\') {
                SourceLocation escape_at = here();
                advance();
                char esc = peek();
                switch (esc) {
                    case '"':
                        value.push_back('"');
                        break;
                    case '\\':
                        value.push_back('\\');
                        break;
                    case 'n':
                        value.push_back('\n');
                        break;
                    case 't':
                        value.push_back('\t');
                        break;
                    default:
                        if (pos_ >= source_.size()) {
                            throw ParseError("unterminated string literal", start);
                        }
                        throw ParseError("invalid escape sequence in string literal", escape_at);
                }
                advance();
                continue;
            }
            std::size_t begin = pos_;
            advance();
            value.append(source_.substr(begin, pos_ - begin));
        }
        return {TokenKind::StringLiteral, std::move(value), start};
    }

    auto symbol(SourceLocation start) -> Token {
        static constexpr std::array<std::string_view, 6> kTwoChar = {">=", "<=", "==",
                                                                      "!=", "=>", "<>"};
        if (pos_ + 1 < source_.size()) {
            std::string_view two = source_.substr(pos_, 2);
            if (two == "<>") {
                throw ParseError("unexpected '<>'; inequality is written '!='", start);
            }
            if (std::find(kTwoChar.begin(), kTwoChar.end(), two) != kTwoChar.end()) {
                advance();
                advance();
                return {TokenKind::Symbol, std::string(two), start};
            }
        }
        char ch = peek();
        static constexpr std::string_view kSingle = "><+-*/()[],:.";
        if (kSingle.find(ch) != std::string_view::npos) {
            advance();
            return {TokenKind::Symbol, std::string(1, ch), start};
        }
        if (ch == '=') {
            throw ParseError("unexpected '='; equality is written '=='", start);
        }
        if (static_cast<unsigned char>(ch) >= 0x80) {
            if (utf8_sequence_length(source_, pos_) == 0) {
                throw ParseError("invalid UTF-8 byte in source", start);
            }
            throw ParseError("illegal character outside string literal", start);
        }
        std::string shown = (ch >= 0x20 && ch < 0x7f) ? std::string(1, ch) : "\\x" + hex(ch);
        throw ParseError("illegal character '" + shown + "'", start);
    }

    static auto hex(char ch) -> std::string {
        static constexpr char kDigits[] = "0123456789abcdef";
        auto byte = static_cast<unsigned char>(ch);
        return {kDigits[byte >> 4], kDigits[byte & 0xF]};
    }

    std::string_view source_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

}  // namespace

auto token_kind_name(TokenKind kind) -> std::string_view {
    switch (kind) {
        case TokenKind::Keyword:
            return "keyword";
        case TokenKind::Identifier:
            return "identifier";
        case TokenKind::IntLiteral:
            return "integer literal";
        case TokenKind::DecimalLiteral:
            return "decimal literal";
        case TokenKind::StringLiteral:
            return "string literal";
        case TokenKind::Symbol:
            return "symbol";
        case TokenKind::End:
            return "end of input";
    }
    return "token";
}

ParseError::ParseError(std::string message, SourceLocation location,
                       std::vector<std::string> expected)
    : std::runtime_error(to_string(location) + ": " + message),
      message_(std::move(message)),
      location_(location),
      expected_(std::move(expected)) {}

auto is_keyword(std::string_view word) -> bool {
    return std::find(std::begin(kKeywords), std::end(kKeywords), word) != std::end(kKeywords);
}

auto tokenize(std::string_view source) -> std::vector<Token> {
    auto tokens = Lexer(source).run();
    tokens.pop_back();
    return tokens;
}

namespace detail {

auto tokenize_with_end(std::string_view source) -> std::vector<Token> {
    return Lexer(source).run();
}

}  // namespace detail

}  // namespace anka
