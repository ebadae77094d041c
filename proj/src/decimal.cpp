#include <anka/decimal.hpp>

#include <algorithm>
#include <array>
#include <limits>

namespace anka {

namespace {

using Mantissa = Decimal::Mantissa;

constexpr int kMaxPow10 = 38;

constexpr auto make_pow10_table() -> std::array<Mantissa, kMaxPow10 + 1> {
    std::array<Mantissa, kMaxPow10 + 1> table{};
    Mantissa value = 1;
    for (int i = 0; i <= kMaxPow10; ++i) {
        table[static_cast<std::size_t>(i)] = value;
        if (i < kMaxPow10) {
            value *= 10;
        }
    }
    return table;
}

constexpr auto kPow10 = make_pow10_table();

// |mantissa| must stay below 10^28; see class comment.
constexpr Mantissa kMantissaLimit = kPow10[28];

auto check_range(Mantissa m) -> Mantissa {
    if (m >= kMantissaLimit || m <= -kMantissaLimit) {
        throw DecimalError("decimal overflow");
    }
    return m;
}

auto checked_mul(Mantissa a, Mantissa b) -> Mantissa {
    Mantissa out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw DecimalError("decimal overflow");
    }
    return out;
}

// Integer division rounded half-even. `divisor` is non-zero.
auto div_half_even(Mantissa dividend, Mantissa divisor) -> Mantissa {
    Mantissa quotient = dividend / divisor;
    Mantissa remainder = dividend % divisor;
    if (remainder == 0) {
        return quotient;
    }
    const bool negative = (dividend < 0) != (divisor < 0);
    Mantissa abs_rem = remainder < 0 ? -remainder : remainder;
    Mantissa abs_div = divisor < 0 ? -divisor : divisor;
    // 2*|r| compared with |d| without overflowing: |r| < |d| so |d| - |r| > 0.
    Mantissa rest = abs_div - abs_rem;
    bool round_away = false;
    if (abs_rem > rest) {
        round_away = true;
    } else if (abs_rem == rest) {
        round_away = (quotient % 2) != 0;
    }
    if (round_away) {
        quotient += negative ? -1 : 1;
    }
    return quotient;
}

auto mantissa_to_string(Mantissa m) -> std::string {
    if (m == 0) {
        return "0";
    }
    bool negative = m < 0;
    std::string digits;
    while (m != 0) {
        int digit = static_cast<int>(m % 10);
        digits.push_back(static_cast<char>('0' + (digit < 0 ? -digit : digit)));
        m /= 10;
    }
    if (negative) {
        digits.push_back('-');
    }
    std::reverse(digits.begin(), digits.end());
    return digits;
}

}  // namespace

auto pow10_i128(int exponent) -> Mantissa {
    if (exponent < 0 || exponent > kMaxPow10) {
        throw DecimalError("decimal exponent out of range");
    }
    return kPow10[static_cast<std::size_t>(exponent)];
}

Decimal::Decimal(Mantissa mantissa, int scale) : mantissa_(check_range(mantissa)), scale_(scale) {
    if (scale < 0 || scale > kMaxScale) {
        throw DecimalError("decimal scale out of range: " + std::to_string(scale));
    }
}

auto Decimal::from_int(std::int64_t value) -> Decimal {
    return Decimal(static_cast<Mantissa>(value), 0);
}

auto Decimal::parse(std::string_view text) -> Decimal {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        negative = text[pos] == '-';
        ++pos;
    }
    Mantissa mantissa = 0;
    int scale = 0;
    std::size_t int_digits = 0;
    std::size_t frac_digits = 0;
    bool seen_point = false;
    for (; pos < text.size(); ++pos) {
        char ch = text[pos];
        if (ch == '.') {
            if (seen_point) {
                throw DecimalError("invalid decimal: '" + std::string(text) + "'");
            }
            seen_point = true;
            continue;
        }
        if (ch < '0' || ch > '9') {
            throw DecimalError("invalid decimal: '" + std::string(text) + "'");
        }
        if (seen_point) {
            ++frac_digits;
            ++scale;
            if (scale > kMaxScale) {
                throw DecimalError("decimal has more than " + std::to_string(kMaxScale) +
                                   " fractional digits: '" + std::string(text) + "'");
            }
        } else {
            ++int_digits;
        }
        mantissa = mantissa * 10 + (ch - '0');
        if (mantissa >= kMantissaLimit) {
            throw DecimalError("decimal overflow: '" + std::string(text) + "'");
        }
    }
    if (int_digits == 0 || (seen_point && frac_digits == 0)) {
        throw DecimalError("invalid decimal: '" + std::string(text) + "'");
    }
    return Decimal(negative ? -mantissa : mantissa, scale);
}

auto Decimal::to_string() const -> std::string {
    Mantissa abs = mantissa_ < 0 ? -mantissa_ : mantissa_;
    std::string digits = mantissa_to_string(abs);
    if (scale_ > 0) {
        if (digits.size() <= static_cast<std::size_t>(scale_)) {
            digits.insert(0, static_cast<std::size_t>(scale_) + 1 - digits.size(), '0');
        }
        digits.insert(digits.size() - static_cast<std::size_t>(scale_), 1, '.');
    }
    if (mantissa_ < 0) {
        digits.insert(0, 1, '-');
    }
    return digits;
}

auto Decimal::rescaled(int new_scale) const -> Decimal {
    if (new_scale == scale_) {
        return *this;
    }
    if (new_scale > scale_) {
        return Decimal(checked_mul(mantissa_, pow10_i128(new_scale - scale_)), new_scale);
    }
    return Decimal(div_half_even(mantissa_, pow10_i128(scale_ - new_scale)), new_scale);
}

auto Decimal::normalized() const -> Decimal {
    Decimal out = *this;
    while (out.scale_ > 0 && out.mantissa_ % 10 == 0) {
        out.mantissa_ /= 10;
        --out.scale_;
    }
    return out;
}

auto Decimal::to_int64() const -> std::int64_t {
    Mantissa whole = mantissa_ / pow10_i128(scale_);
    if (whole > std::numeric_limits<std::int64_t>::max() ||
        whole < std::numeric_limits<std::int64_t>::min()) {
        throw DecimalError("decimal " + to_string() + " does not fit in INT");
    }
    return static_cast<std::int64_t>(whole);
}

auto Decimal::hash() const noexcept -> std::size_t {
    Decimal n = normalized();
    auto bits = static_cast<unsigned __int128>(n.mantissa_);
    auto lo = static_cast<std::uint64_t>(bits);
    auto hi = static_cast<std::uint64_t>(bits >> 64);
    std::size_t h = std::hash<std::uint64_t>{}(lo);
    h ^= std::hash<std::uint64_t>{}(hi) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::size_t>(n.scale_) * 0x100000001b3ULL;
    return h;
}

auto operator+(const Decimal& a, const Decimal& b) -> Decimal {
    int scale = std::max(a.scale_, b.scale_);
    Mantissa lhs = a.rescaled(scale).mantissa_;
    Mantissa rhs = b.rescaled(scale).mantissa_;
    return Decimal(lhs + rhs, scale);
}

auto operator-(const Decimal& a, const Decimal& b) -> Decimal {
    int scale = std::max(a.scale_, b.scale_);
    Mantissa lhs = a.rescaled(scale).mantissa_;
    Mantissa rhs = b.rescaled(scale).mantissa_;
    return Decimal(lhs - rhs, scale);
}

auto operator-(const Decimal& a) -> Decimal {
    return Decimal(-a.mantissa_, a.scale_);
}

auto operator*(const Decimal& a, const Decimal& b) -> Decimal {
    Mantissa product = checked_mul(a.mantissa_, b.mantissa_);
    int scale = a.scale_ + b.scale_;
    if (scale > Decimal::kMaxScale) {
        product = div_half_even(product, pow10_i128(scale - Decimal::kMaxScale));
        scale = Decimal::kMaxScale;
    }
    return Decimal(product, scale);
}

auto Decimal::division_scale(int left_scale, int right_scale) -> int {
    return std::min(std::max(left_scale, right_scale) + 4, kMaxScale);
}

auto Decimal::divide(const Decimal& dividend, const Decimal& divisor, int result_scale)
    -> Decimal {
    if (divisor.is_zero()) {
        throw DecimalError("division by zero");
    }
    // quotient * 10^-rs = (m1 * 10^-s1) / (m2 * 10^-s2)
    //   => quotient = m1 * 10^(rs + s2 - s1) / m2
    int exponent = result_scale + divisor.scale_ - dividend.scale_;
    Mantissa numerator = dividend.mantissa_;
    Mantissa denominator = divisor.mantissa_;
    if (exponent >= 0) {
        numerator = checked_mul(numerator, pow10_i128(exponent));
    } else {
        denominator = checked_mul(denominator, pow10_i128(-exponent));
    }
    return Decimal(div_half_even(numerator, denominator), result_scale);
}

auto operator<=>(const Decimal& a, const Decimal& b) -> std::strong_ordering {
    int scale = std::max(a.scale_, b.scale_);
    Mantissa lhs = a.mantissa_ * pow10_i128(scale - a.scale_);
    Mantissa rhs = b.mantissa_ * pow10_i128(scale - b.scale_);
    if (lhs < rhs) {
        return std::strong_ordering::less;
    }
    if (lhs > rhs) {
        return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

auto operator==(const Decimal& a, const Decimal& b) -> bool {
    return (a <=> b) == 0;
}

}  // namespace anka
