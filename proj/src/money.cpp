#include "lowcoll/money.hpp"

#include <cmath>
#include <limits>

#include "lowcoll/error.hpp"

namespace lowcoll {

namespace {

using i128 = __int128;
using u128 = unsigned __int128;

constexpr i128 kMaxI64 = std::numeric_limits<std::int64_t>::max();
constexpr i128 kMinI64 = std::numeric_limits<std::int64_t>::min();

std::int64_t narrow(i128 value) {
  if (value > kMaxI64 || value < kMinI64) {
    throw InvariantViolation("money overflow");
  }
  return static_cast<std::int64_t>(value);
}

// Splits a finite non-zero double into mantissa * 2^exponent with an integer
// mantissa (|mantissa| < 2^53).
void decompose(double value, std::int64_t& mantissa, int& exponent) {
  int exp2 = 0;
  const double frac = std::frexp(value, &exp2);
  mantissa = static_cast<std::int64_t>(std::ldexp(frac, 53));
  exponent = exp2 - 53;
}

// Rounds magnitude / 2^shift half-to-even.
u128 shift_round_even(u128 magnitude, int shift) {
  if (shift <= 0) return magnitude;
  if (shift >= 128) return 0;
  const u128 quotient = magnitude >> shift;
  const u128 remainder = magnitude & ((u128{1} << shift) - 1);
  const u128 half = u128{1} << (shift - 1);
  if (remainder > half || (remainder == half && (quotient & 1) != 0)) {
    return quotient + 1;
  }
  return quotient;
}

}  // namespace

Money Money::from_usd(std::int64_t whole_usd) {
  return Money(narrow(static_cast<i128>(whole_usd) * kMicrosPerUsd));
}

Money Money::parse(std::string_view text) {
  std::string_view rest = text;
  bool negative = false;
  if (!rest.empty() && (rest.front() == '-' || rest.front() == '+')) {
    negative = rest.front() == '-';
    rest.remove_prefix(1);
  }
  if (rest.empty()) throw ValidationError("empty decimal '" + std::string(text) + "'");

  i128 whole = 0;
  std::size_t i = 0;
  std::size_t int_digits = 0;
  for (; i < rest.size() && rest[i] != '.'; ++i) {
    const char c = rest[i];
    if (c < '0' || c > '9') {
      throw ValidationError("invalid decimal '" + std::string(text) + "'");
    }
    whole = whole * 10 + (c - '0');
    if (whole > kMaxI64) throw ValidationError("decimal out of range '" + std::string(text) + "'");
    ++int_digits;
  }
  i128 frac = 0;
  std::size_t frac_digits = 0;
  if (i < rest.size()) {
    ++i;  // '.'
    for (; i < rest.size(); ++i) {
      const char c = rest[i];
      if (c < '0' || c > '9') {
        throw ValidationError("invalid decimal '" + std::string(text) + "'");
      }
      if (++frac_digits > static_cast<std::size_t>(kFractionDigits)) {
        throw ValidationError("more than 6 fractional digits in '" + std::string(text) + "'");
      }
      frac = frac * 10 + (c - '0');
    }
    if (frac_digits == 0 && int_digits == 0) {
      throw ValidationError("invalid decimal '" + std::string(text) + "'");
    }
  }
  if (int_digits == 0 && frac_digits == 0) {
    throw ValidationError("invalid decimal '" + std::string(text) + "'");
  }
  for (std::size_t k = frac_digits; k < static_cast<std::size_t>(kFractionDigits); ++k) frac *= 10;
  i128 total = whole * kMicrosPerUsd + frac;
  if (negative) total = -total;
  if (total > kMaxI64 || total < kMinI64) {
    throw ValidationError("decimal out of range '" + std::string(text) + "'");
  }
  return Money(static_cast<std::int64_t>(total));
}

std::string Money::to_string() const {
  const bool negative = micros_ < 0;
  const u128 magnitude = negative ? static_cast<u128>(-static_cast<i128>(micros_))
                                  : static_cast<u128>(micros_);
  const auto whole = static_cast<std::uint64_t>(magnitude / kMicrosPerUsd);
  auto frac = static_cast<std::uint64_t>(magnitude % kMicrosPerUsd);

  std::string digits(kFractionDigits, '0');
  for (int k = kFractionDigits - 1; k >= 0; --k) {
    digits[static_cast<std::size_t>(k)] = static_cast<char>('0' + frac % 10);
    frac /= 10;
  }
  while (digits.size() > 2 && digits.back() == '0') digits.pop_back();

  std::string out;
  if (negative) out += '-';
  out += std::to_string(whole);
  out += '.';
  out += digits;
  return out;
}

Money Money::operator-() const { return Money(narrow(-static_cast<i128>(micros_))); }

Money& Money::operator+=(Money other) {
  micros_ = narrow(static_cast<i128>(micros_) + other.micros_);
  return *this;
}

Money& Money::operator-=(Money other) {
  micros_ = narrow(static_cast<i128>(micros_) - other.micros_);
  return *this;
}

Money mul_rate(Money amount, double rate) {
  if (!std::isfinite(rate)) throw ValidationError("non-finite rate");
  if (rate == 0.0 || amount.is_zero()) return Money{};

  std::int64_t mantissa = 0;
  int exponent = 0;
  decompose(rate, mantissa, exponent);

  const bool negative = (amount.micros() < 0) != (mantissa < 0);
  const u128 a = amount.micros() < 0 ? static_cast<u128>(-static_cast<i128>(amount.micros()))
                                     : static_cast<u128>(amount.micros());
  const u128 m = mantissa < 0 ? static_cast<u128>(-static_cast<i128>(mantissa))
                              : static_cast<u128>(mantissa);
  u128 magnitude = a * m;  // < 2^117
  if (exponent >= 0) {
    if (exponent > 10) throw InvariantViolation("money overflow");
    magnitude <<= exponent;
  } else {
    magnitude = shift_round_even(magnitude, -exponent);
  }
  if (magnitude > static_cast<u128>(kMaxI64)) throw InvariantViolation("money overflow");
  const auto value = static_cast<i128>(magnitude);
  return Money::from_micros(static_cast<std::int64_t>(negative ? -value : value));
}

int compare_scaled(Money a, Money b, double ratio) {
  if (a.is_negative() || b.is_negative() || !(ratio >= 0.0) || !std::isfinite(ratio)) {
    throw ValidationError("compare_scaled requires non-negative operands");
  }
  if (ratio == 0.0 || b.is_zero()) return a.is_zero() ? 0 : 1;

  std::int64_t mantissa = 0;
  int exponent = 0;
  decompose(ratio, mantissa, exponent);
  const u128 lhs = static_cast<u128>(a.micros());
  u128 rhs = static_cast<u128>(mantissa) * static_cast<u128>(b.micros());  // < 2^116

  auto sign = [](u128 x, u128 y) { return x < y ? -1 : (x > y ? 1 : 0); };
  if (exponent >= 0) {
    // rhs * 2^exponent; lhs < 2^63 so anything past 2^64 is already larger.
    if (exponent > 11 || rhs > (u128{1} << (126 - exponent))) return -1;
    return sign(lhs, rhs << exponent);
  }
  // Compare lhs * 2^k against rhs with k = -exponent.
  const int k = -exponent;
  if (k < 60) return sign(lhs << k, rhs);
  const u128 floor = k >= 128 ? 0 : rhs >> k;
  const u128 remainder = k >= 128 ? rhs : rhs & ((u128{1} << k) - 1);
  if (lhs != floor) return lhs > floor ? 1 : -1;
  return remainder == 0 ? 0 : -1;
}

Money div_round_even(Money a, std::int64_t divisor) {
  if (divisor <= 0) throw ValidationError("divisor must be positive");
  const bool negative = a.is_negative();
  const u128 magnitude = negative ? static_cast<u128>(-static_cast<i128>(a.micros()))
                                  : static_cast<u128>(a.micros());
  const u128 d = static_cast<u128>(divisor);
  u128 quotient = magnitude / d;
  const u128 remainder = magnitude % d;
  if (remainder * 2 > d || (remainder * 2 == d && (quotient & 1) != 0)) ++quotient;
  const auto value = static_cast<i128>(quotient);
  return Money::from_micros(static_cast<std::int64_t>(negative ? -value : value));
}

}  // namespace lowcoll
