#pragma once

#include <cmath>
#include <numbers>

namespace lowcoll::credit {

/// Standard normal density.
template <typename Scalar>
Scalar normal_pdf(Scalar x) {
  using std::exp;
  using std::sqrt;
  const Scalar inv_sqrt_2pi = Scalar(1) / sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
  return inv_sqrt_2pi * exp(-x * x / Scalar(2));
}

/// Standard normal CDF through erfc, accurate to a few ulp in both tails.
template <typename Scalar>
Scalar normal_cdf(Scalar x) {
  using std::erfc;
  return Scalar(0.5) * erfc(-x / std::numbers::sqrt2_v<Scalar>);
}

namespace detail {

// Asymptotic series of Phi(x) * (-x) / phi(x) for x << 0.
template <typename Scalar>
Scalar mills_series(Scalar x) {
  const Scalar r = Scalar(1) / (x * x);
  return Scalar(1) + r * (Scalar(-1) + r * (Scalar(3) + r * (Scalar(-15) + r * Scalar(105))));
}

template <typename Scalar>
constexpr Scalar kAsymptoticBelow = Scalar(-35);

}  // namespace detail

/// log Phi(x) without underflow for very negative x.
template <typename Scalar>
Scalar log_normal_cdf(Scalar x) {
  using std::log;
  using std::log1p;
  if (x > Scalar(0)) return log1p(-normal_cdf(-x));
  if (x > detail::kAsymptoticBelow<Scalar>) return log(normal_cdf(x));
  const Scalar log_pdf = -x * x / Scalar(2) - log(Scalar(2) * std::numbers::pi_v<Scalar>) / Scalar(2);
  return log_pdf - log(-x) + log(detail::mills_series(x));
}

/// phi(x) / Phi(x), the derivative of log Phi.
template <typename Scalar>
Scalar inverse_mills(Scalar x) {
  if (x > detail::kAsymptoticBelow<Scalar>) return normal_pdf(x) / normal_cdf(x);
  return -x / detail::mills_series(x);
}

}  // namespace lowcoll::credit
