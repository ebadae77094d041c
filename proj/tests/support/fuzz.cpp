#include "fuzz.hpp"

#include <anka/syntax.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace anka::testing {

namespace {

const std::vector<std::string> kFragments = {
    "PIPELINE", "INPUT", "STEP", "OUTPUT", "FILTER", "WHERE", "INTO", "MAP", "WITH", "=>",
    "AGGREGATE", "GROUP_BY", "COMPUTE", "AS", "JOIN", "LEFT_JOIN", "ON", "IF", "THEN", "ELSE",
    "END_IF", "FOR_EACH", "IN", "DO", "END_FOR", "WHILE", "END_WHILE", "TRY", "ON_ERROR",
    "END_TRY", "TABLE[", "]", "[", "(", ")", ",", ":", ".", "==", "!=", "<=", ">=", "<", ">",
    "<>", "=", "+", "-", "*", "/", "\"", "\"abc\"", "\"\\n\"", "\"\\", "1000", "0.08", "1.",
    ".5", "-3", "99999999999999999999999", "0.00000000001", "NULL", "TRUE", "FALSE", "AND",
    "OR", "NOT", "INT", "STRING", "DECIMAL", "BOOL", "DATE", "DATETIME", "DATE \"2024-02-30\"",
    "x", "row.x", "_y", "é", "\n", "\r\n", "\t", " ", "#", "--", "COUNT()", "SUM(", "SORT",
    "BY", "DESC", "ASC", "LIMIT", "SKIP", "SLICE", "FROM", "TO", "UNION", "SELECT", "COLUMNS",
    "DROP", "RENAME", "COLUMN", "DISTINCT", "ADD_COLUMN", "READ", "WRITE", "FETCH", "POST",
    "JSON", "CSV", std::string("\0", 1), "\xff\xfe", "\xc3"};

}  // namespace

auto load_corpus(const std::filesystem::path& dir) -> std::vector<std::pair<std::string, std::string>> {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".anka") {
            continue;
        }
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream text;
        text << in.rdbuf();
        out.emplace_back(entry.path().filename().string(), text.str());
    }
    std::sort(out.begin(), out.end());
    return out;
}

auto mutate(Rng& rng, const std::string& source) -> std::string {
    std::string s = source;
    auto edits = uniform(rng, 1, 6);
    for (std::int64_t e = 0; e < edits; ++e) {
        auto pos = [&] {
            return static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(s.size())));
        };
        switch (uniform(rng, 0, 6)) {
            case 0:
                if (!s.empty()) {
                    s[std::min(pos(), s.size() - 1)] = static_cast<char>(uniform(rng, 0, 255));
                }
                break;
            case 1: {
                std::size_t at = pos();
                s.erase(at, static_cast<std::size_t>(uniform(rng, 1, 20)));
                break;
            }
            case 2:
                s.insert(pos(), pick(rng, kFragments));
                break;
            case 3:
                s.resize(pos());
                break;
            case 4: {
                std::size_t a = pos();
                std::size_t n = static_cast<std::size_t>(uniform(rng, 1, 60));
                s.insert(pos(), s.substr(a, n));
                break;
            }
            case 5: {
                // Swap two lines.
                std::vector<std::string> lines;
                std::istringstream in(s);
                for (std::string line; std::getline(in, line);) {
                    lines.push_back(line);
                }
                if (lines.size() > 1) {
                    auto i = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(lines.size()) - 1));
                    auto j = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(lines.size()) - 1));
                    std::swap(lines[i], lines[j]);
                    s.clear();
                    for (const auto& l : lines) {
                        s += l + "\n";
                    }
                }
                break;
            }
            default:
                s.insert(pos(), std::string(static_cast<std::size_t>(uniform(rng, 1, 200)),
                                            pick(rng, std::vector<char>{'(', '"', ' ', '\n', '-'})));
                break;
        }
    }
    return s;
}

auto random_bytes(Rng& rng, std::size_t max_len) -> std::string {
    std::string s(static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(max_len))), '\0');
    for (auto& c : s) {
        c = static_cast<char>(uniform(rng, 0, 255));
    }
    return s;
}

auto token_soup(Rng& rng, std::size_t max_tokens) -> std::string {
    std::string s;
    auto n = uniform(rng, 0, static_cast<std::int64_t>(max_tokens));
    for (std::int64_t i = 0; i < n; ++i) {
        s += pick(rng, kFragments);
        s += chance(rng, 0.8) ? " " : "";
    }
    return s;
}

auto deep_nesting(Rng& rng, std::size_t max_depth) -> std::string {
    auto depth = static_cast<std::size_t>(uniform(rng, 1, static_cast<std::int64_t>(max_depth)));
    std::string head = "PIPELINE p:\n  INPUT t: TABLE[a: INT]\n  STEP s:\n";
    std::string expr;
    switch (uniform(rng, 0, 3)) {
        case 0:
            expr = std::string(depth, '(') + "a" + std::string(depth, ')');
            break;
        case 1:
            for (std::size_t i = 0; i < depth; ++i) {
                expr += "NOT ";
            }
            expr += "a";
            break;
        case 2:
            expr = std::string(depth, '-') + "a > 0";
            break;
        default: {
            std::string body;
            for (std::size_t i = 0; i < depth; ++i) {
                body += "IF TRUE THEN\n";
            }
            body += "FILTER t WHERE a > 0 INTO r\n";
            for (std::size_t i = 0; i < depth; ++i) {
                body += "END_IF\n";
            }
            return head + body + "  OUTPUT t\n";
        }
    }
    return head + "    FILTER t WHERE " + expr + " INTO r\n  OUTPUT r\n";
}

auto check_parse_total(const std::string& input) -> std::optional<std::string> {
    try {
        Pipeline p = parse(input);
        (void)p;
        return std::nullopt;
    } catch (const ParseError& e) {
        const SourceLocation& loc = e.location();
        if (loc.line < 1 || loc.column < 1 || loc.offset > input.size()) {
            return "parse error with out-of-range location " + to_string(loc) + ": " + e.what();
        }
        return std::nullopt;
    } catch (const std::exception& e) {
        return std::string("unexpected exception: ") + e.what();
    } catch (...) {
        return "unexpected non-standard exception";
    }
}

}  // namespace anka::testing
