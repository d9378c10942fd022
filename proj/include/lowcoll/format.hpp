#pragma once

#include <string>

namespace lowcoll {

/// Shortest round-trip rendering in positional notation ("1500", "0.0001",
/// "1.6666666666666667"). Locale independent.
std::string format_double(double value);

/// Fixed rendering with at most `digits` fractional digits, trailing zeros
/// (and a bare point) trimmed: format_fixed(43.93750000001, 6) == "43.9375".
std::string format_fixed(double value, int digits);

}  // namespace lowcoll
