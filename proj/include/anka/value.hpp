#pragma once

#include <anka/decimal.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace anka {

enum class ValueType { Int, String, Decimal, Bool, Date, DateTime };

/// Upper-case keyword spelling: INT, STRING, DECIMAL, BOOL, DATE, DATETIME.
auto type_name(ValueType type) -> std::string_view;
auto parse_type_name(std::string_view name) -> std::optional<ValueType>;

/// Calendar date as days since 1970-01-01.
struct Date {
    std::int32_t days = 0;

    /// Strict `YYYY-MM-DD`. Returns nullopt for malformed or impossible dates.
    static auto parse(std::string_view text) -> std::optional<Date>;
    static auto from_civil(int year, unsigned month, unsigned day) -> std::optional<Date>;
    [[nodiscard]] auto to_string() const -> std::string;
    [[nodiscard]] auto year() const -> int;
    [[nodiscard]] auto month() const -> unsigned;
    [[nodiscard]] auto day() const -> unsigned;

    friend auto operator<=>(const Date&, const Date&) = default;
};

/// Timestamp with seconds precision as seconds since 1970-01-01T00:00:00.
/// No time zone.
struct DateTime {
    std::int64_t seconds = 0;

    /// Strict `YYYY-MM-DDTHH:MM:SS`.
    static auto parse(std::string_view text) -> std::optional<DateTime>;
    [[nodiscard]] auto to_string() const -> std::string;
    [[nodiscard]] auto date() const -> Date;

    friend auto operator<=>(const DateTime&, const DateTime&) = default;
};

/// One table cell. Alternative order is part of the representation; index 0
/// is null.
class Value {
public:
    using Storage =
        std::variant<std::monostate, std::int64_t, std::string, Decimal, bool, Date, DateTime>;

    Value() = default;
    Value(std::int64_t v) : data_(v) {}
    Value(int v) : data_(static_cast<std::int64_t>(v)) {}
    Value(std::string v) : data_(std::move(v)) {}
    Value(const char* v) : data_(std::string(v)) {}
    Value(Decimal v) : data_(v) {}
    Value(bool v) : data_(v) {}
    Value(Date v) : data_(v) {}
    Value(DateTime v) : data_(v) {}

    static auto null() -> Value { return Value(); }

    [[nodiscard]] auto is_null() const noexcept -> bool {
        return std::holds_alternative<std::monostate>(data_);
    }
    /// nullopt for null.
    [[nodiscard]] auto type() const noexcept -> std::optional<ValueType>;

    [[nodiscard]] auto as_int() const -> std::int64_t { return std::get<std::int64_t>(data_); }
    [[nodiscard]] auto as_string() const -> const std::string& {
        return std::get<std::string>(data_);
    }
    [[nodiscard]] auto as_decimal() const -> const Decimal& { return std::get<Decimal>(data_); }
    [[nodiscard]] auto as_bool() const -> bool { return std::get<bool>(data_); }
    [[nodiscard]] auto as_date() const -> Date { return std::get<Date>(data_); }
    [[nodiscard]] auto as_datetime() const -> DateTime { return std::get<DateTime>(data_); }

    [[nodiscard]] auto storage() const noexcept -> const Storage& { return data_; }

    /// Human-readable rendering; null renders as `null`, strings unquoted.
    [[nodiscard]] auto to_string() const -> std::string;

    [[nodiscard]] auto hash() const noexcept -> std::size_t;

    /// Cell equality as used by table comparison, grouping, and DISTINCT:
    /// null equals null, decimals compare by value, and INT 2 equals
    /// DECIMAL 2.0.
    friend auto operator==(const Value& a, const Value& b) -> bool;

private:
    Storage data_;
};

/// Ordering between two cells. `unordered` means incomparable: a cross-type
/// pair other than INT/DECIMAL, or a pair where exactly one side is null.
/// Two nulls are `equivalent`.
auto compare_values(const Value& left, const Value& right) -> std::partial_ordering;

/// INT and DECIMAL are mutually comparable; every other type only with itself.
auto types_comparable(ValueType a, ValueType b) -> bool;
auto is_numeric(ValueType type) -> bool;

}  // namespace anka

template <>
struct std::hash<anka::Value> {
    auto operator()(const anka::Value& v) const noexcept -> std::size_t { return v.hash(); }
};
