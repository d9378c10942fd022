#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace lowcoll {

/// USD amount held as an exact count of micro-dollars (1 USD = 1,000,000).
///
/// All ledger arithmetic stays in integers. Overflowing operations throw
/// `InvariantViolation` instead of wrapping.
class Money {
 public:
  static constexpr std::int64_t kMicrosPerUsd = 1'000'000;
  static constexpr int kFractionDigits = 6;

  constexpr Money() = default;

  static constexpr Money from_micros(std::int64_t micros) { return Money(micros); }
  static Money from_usd(std::int64_t whole_usd);

  /// Parses a plain decimal string ("12", "-3.5", "100.000001").
  /// More than six fractional digits, exponents or stray characters are errors.
  static Money parse(std::string_view text);

  constexpr std::int64_t micros() const { return micros_; }
  double to_usd() const { return static_cast<double>(micros_) / kMicrosPerUsd; }

  /// Decimal rendering with at least two fractional digits: "100.00", "0.123456".
  std::string to_string() const;

  constexpr bool is_zero() const { return micros_ == 0; }
  constexpr bool is_negative() const { return micros_ < 0; }

  Money operator-() const;
  Money& operator+=(Money other);
  Money& operator-=(Money other);
  friend Money operator+(Money a, Money b) { return a += b; }
  friend Money operator-(Money a, Money b) { return a -= b; }

  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  constexpr explicit Money(std::int64_t micros) : micros_(micros) {}

  std::int64_t micros_ = 0;
};

constexpr Money min(Money a, Money b) { return a < b ? a : b; }
constexpr Money max(Money a, Money b) { return a < b ? b : a; }

/// amount * rate, computed exactly from the binary value of `rate` and
/// rounded half-to-even to the nearest micro-dollar.
Money mul_rate(Money amount, double rate);

/// Sign of (a - ratio * b), evaluated exactly. Requires a, b, ratio >= 0.
int compare_scaled(Money a, Money b, double ratio);

/// a / divisor rounded half-to-even.
Money div_round_even(Money a, std::int64_t divisor);

}  // namespace lowcoll
