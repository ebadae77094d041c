#include <anka/value.hpp>

#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>

namespace anka {

namespace {

constexpr std::array<std::string_view, 6> kTypeNames = {"INT",  "STRING", "DECIMAL",
                                                        "BOOL", "DATE",   "DATETIME"};

auto parse_fixed_digits(std::string_view text, std::size_t pos, std::size_t count)
    -> std::optional<int> {
    if (pos + count > text.size()) {
        return std::nullopt;
    }
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        char ch = text[i];
        if (ch < '0' || ch > '9') {
            return std::nullopt;
        }
        value = value * 10 + (ch - '0');
    }
    return value;
}

constexpr std::int64_t kSecondsPerDay = 86400;

auto floor_div(std::int64_t a, std::int64_t b) -> std::int64_t {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

auto civil(Date d) -> std::chrono::year_month_day {
    return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{d.days}}};
}

template <typename T>
auto hash_combine(std::size_t seed, const T& v) -> std::size_t {
    return seed ^ (std::hash<T>{}(v) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

auto type_name(ValueType type) -> std::string_view {
    return kTypeNames[static_cast<std::size_t>(type)];
}

auto parse_type_name(std::string_view name) -> std::optional<ValueType> {
    for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
        if (kTypeNames[i] == name) {
            return static_cast<ValueType>(i);
        }
    }
    return std::nullopt;
}

auto Date::from_civil(int year, unsigned month, unsigned day) -> std::optional<Date> {
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                    std::chrono::day{day}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    return Date{static_cast<std::int32_t>(days)};
}

auto Date::parse(std::string_view text) -> std::optional<Date> {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    auto y = parse_fixed_digits(text, 0, 4);
    auto m = parse_fixed_digits(text, 5, 2);
    auto d = parse_fixed_digits(text, 8, 2);
    if (!y || !m || !d) {
        return std::nullopt;
    }
    return from_civil(*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
}

auto Date::to_string() const -> std::string {
    auto ymd = civil(*this);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

auto Date::year() const -> int { return static_cast<int>(civil(*this).year()); }
auto Date::month() const -> unsigned { return static_cast<unsigned>(civil(*this).month()); }
auto Date::day() const -> unsigned { return static_cast<unsigned>(civil(*this).day()); }

auto DateTime::parse(std::string_view text) -> std::optional<DateTime> {
    if (text.size() != 19 || text[10] != 'T' || text[13] != ':' || text[16] != ':') {
        return std::nullopt;
    }
    auto date = Date::parse(text.substr(0, 10));
    auto hh = parse_fixed_digits(text, 11, 2);
    auto mm = parse_fixed_digits(text, 14, 2);
    auto ss = parse_fixed_digits(text, 17, 2);
    if (!date || !hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 59) {
        return std::nullopt;
    }
    return DateTime{static_cast<std::int64_t>(date->days) * kSecondsPerDay + *hh * 3600 +
                    *mm * 60 + *ss};
}

auto DateTime::date() const -> Date {
    return Date{static_cast<std::int32_t>(floor_div(seconds, kSecondsPerDay))};
}

auto DateTime::to_string() const -> std::string {
    Date d = date();
    std::int64_t rem = seconds - static_cast<std::int64_t>(d.days) * kSecondsPerDay;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "T%02d:%02d:%02d", static_cast<int>(rem / 3600),
                  static_cast<int>((rem / 60) % 60), static_cast<int>(rem % 60));
    return d.to_string() + buf;
}

auto Value::type() const noexcept -> std::optional<ValueType> {
    switch (data_.index()) {
        case 1:
            return ValueType::Int;
        case 2:
            return ValueType::String;
        case 3:
            return ValueType::Decimal;
        case 4:
            return ValueType::Bool;
        case 5:
            return ValueType::Date;
        case 6:
            return ValueType::DateTime;
        default:
            return std::nullopt;
    }
}

auto Value::to_string() const -> std::string {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return "null";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else {
                return v.to_string();
            }
        },
        data_);
}

auto Value::hash() const noexcept -> std::size_t {
    // INT and DECIMAL hash through the same normalized decimal so that values
    // equal under operator== collide.
    return std::visit(
        [](const auto& v) -> std::size_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return 0x51ed270b;
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return Decimal::from_int(v).hash();
            } else if constexpr (std::is_same_v<T, Decimal>) {
                return v.hash();
            } else if constexpr (std::is_same_v<T, Date>) {
                return hash_combine(5, v.days);
            } else if constexpr (std::is_same_v<T, DateTime>) {
                return hash_combine(6, v.seconds);
            } else {
                return hash_combine(std::size_t{7}, v);
            }
        },
        data_);
}

auto operator==(const Value& a, const Value& b) -> bool {
    if (a.is_null() || b.is_null()) {
        return a.is_null() && b.is_null();
    }
    return compare_values(a, b) == std::partial_ordering::equivalent;
}

auto is_numeric(ValueType type) -> bool {
    return type == ValueType::Int || type == ValueType::Decimal;
}

auto types_comparable(ValueType a, ValueType b) -> bool {
    return a == b || (is_numeric(a) && is_numeric(b));
}

auto compare_values(const Value& left, const Value& right) -> std::partial_ordering {
    if (left.is_null() || right.is_null()) {
        return (left.is_null() && right.is_null()) ? std::partial_ordering::equivalent
                                                   : std::partial_ordering::unordered;
    }
    const auto lt = *left.type();
    const auto rt = *right.type();
    if (lt == ValueType::Int && rt == ValueType::Decimal) {
        return Decimal::from_int(left.as_int()) <=> right.as_decimal();
    }
    if (lt == ValueType::Decimal && rt == ValueType::Int) {
        return left.as_decimal() <=> Decimal::from_int(right.as_int());
    }
    if (lt != rt) {
        return std::partial_ordering::unordered;
    }
    switch (lt) {
        case ValueType::Int:
            return left.as_int() <=> right.as_int();
        case ValueType::String:
            // std::string compares by unsigned char, which is code-point order
            // for UTF-8.
            return left.as_string().compare(right.as_string()) <=> 0;
        case ValueType::Decimal:
            return left.as_decimal() <=> right.as_decimal();
        case ValueType::Bool:
            return left.as_bool() <=> right.as_bool();
        case ValueType::Date:
            return left.as_date() <=> right.as_date();
        case ValueType::DateTime:
            return left.as_datetime() <=> right.as_datetime();
    }
    return std::partial_ordering::unordered;
}

}  // namespace anka
