#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace anka {

/// Raised when a decimal operation would leave the representable range, or
/// when text cannot be read as a decimal.
class DecimalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact fixed-point number: a 128-bit mantissa scaled by 10^-scale.
///
/// Scale is carried per value (1.50 has scale 2, 1.5 has scale 1). The two
/// compare equal; only formatting differs. Mantissas are kept below 10^28 in
/// magnitude so that aligning any two values to a common scale cannot
/// overflow the 128-bit representation.
class Decimal {
public:
    using Mantissa = __int128;

    static constexpr int kMaxScale = 10;

    constexpr Decimal() = default;

    /// Throws DecimalError when scale or mantissa is out of range.
    Decimal(Mantissa mantissa, int scale);

    static auto from_int(std::int64_t value) -> Decimal;

    /// Accepts `[+-]digits[.digits]`. At most kMaxScale fractional digits.
    static auto parse(std::string_view text) -> Decimal;

    [[nodiscard]] auto mantissa() const noexcept -> Mantissa { return mantissa_; }
    [[nodiscard]] auto scale() const noexcept -> int { return scale_; }
    [[nodiscard]] auto is_zero() const noexcept -> bool { return mantissa_ == 0; }
    [[nodiscard]] auto is_negative() const noexcept -> bool { return mantissa_ < 0; }

    /// Fixed notation with exactly scale() fractional digits.
    [[nodiscard]] auto to_string() const -> std::string;

    /// Same value at a different scale. Narrowing rounds half-even.
    [[nodiscard]] auto rescaled(int new_scale) const -> Decimal;

    /// Trailing fractional zeros removed; equal values normalize identically.
    [[nodiscard]] auto normalized() const -> Decimal;

    /// Truncates toward zero. Throws DecimalError if the result exceeds int64.
    [[nodiscard]] auto to_int64() const -> std::int64_t;

    [[nodiscard]] auto hash() const noexcept -> std::size_t;

    friend auto operator+(const Decimal& a, const Decimal& b) -> Decimal;
    friend auto operator-(const Decimal& a, const Decimal& b) -> Decimal;
    /// Result scale is the sum of operand scales, capped at kMaxScale (half-even).
    friend auto operator*(const Decimal& a, const Decimal& b) -> Decimal;
    friend auto operator-(const Decimal& a) -> Decimal;

    /// Quotient at `result_scale`, rounded half-even. Throws DecimalError on a
    /// zero divisor.
    static auto divide(const Decimal& dividend, const Decimal& divisor, int result_scale)
        -> Decimal;

    /// Result scale used by the language for `/` and AVG.
    static auto division_scale(int left_scale, int right_scale) -> int;

    friend auto operator<=>(const Decimal& a, const Decimal& b) -> std::strong_ordering;
    friend auto operator==(const Decimal& a, const Decimal& b) -> bool;

private:
    Mantissa mantissa_ = 0;
    int scale_ = 0;
};

auto pow10_i128(int exponent) -> Decimal::Mantissa;

}  // namespace anka
