#include "lowcoll/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "lowcoll/error.hpp"

namespace lowcoll {

std::string format_double(double value) {
  if (!std::isfinite(value)) throw ValidationError("cannot format non-finite value");
  if (value == 0.0) return "0";
  std::array<char, 400> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                    std::chars_format::fixed);
  return std::string(buf.data(), result.ptr);
}

std::string format_fixed(double value, int digits) {
  if (!std::isfinite(value)) throw ValidationError("cannot format non-finite value");
  std::array<char, 400> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                    std::chars_format::fixed, digits);
  std::string out(buf.data(), result.ptr);
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  if (out == "-0") out = "0";
  return out;
}

}  // namespace lowcoll
